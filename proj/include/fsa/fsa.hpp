#pragma once

#include "fsa/core.hpp"
#include "fsa/hermitian_eigen.hpp"
#include "fsa/mat_path.hpp"
#include "fsa/eig_curves.hpp"
#include "fsa/spectrum.hpp"
#include "fsa/level_surgery.hpp"
#include "fsa/functional_calculus.hpp"
#include "fsa/approximant.hpp"
#include "fsa/serialization.hpp"
#include "fsa/report_io.hpp"
#include "fsa/verify.hpp"
#include "fsa/instances.hpp"
