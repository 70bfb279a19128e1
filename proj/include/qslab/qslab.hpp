#pragma once

// Umbrella header for the qslab library.

#include "qslab/algebra.hpp"
#include "qslab/almost_abelian.hpp"
#include "qslab/frame_functions.hpp"
#include "qslab/io.hpp"
#include "qslab/quasistate.hpp"
#include "qslab/random.hpp"
#include "qslab/reductive.hpp"
#include "qslab/unitary_motion.hpp"
