#pragma once

// Umbrella header: the whole makespan-scheduling toolkit in one include.
//
//   instance.hpp      instances, schedules, generators, text format
//   baselines.hpp     LPT, MULTIFIT, DJMS reference heuristics
//   rounding.hpp      geometric-arithmetic size menus and their verifier
//   rounding_opt.hpp  search for the best menu at a given length, MILP export
//   preprocess.hpp    job classification and huge-job pairing
//   configip.hpp      configuration IP, compressed columns, both switchings
//   convolution.hpp   multi-dimensional FFT convolution with exact rounding
//   jrsolver.hpp      doubling solver for the compressed covering IP
//   driver.hpp        dual-approximation binary search, oracle, benchmarks

#include "cmax/baselines.hpp"
#include "cmax/configip.hpp"
#include "cmax/convolution.hpp"
#include "cmax/driver.hpp"
#include "cmax/errors.hpp"
#include "cmax/instance.hpp"
#include "cmax/jrsolver.hpp"
#include "cmax/preprocess.hpp"
#include "cmax/rational.hpp"
#include "cmax/rounding.hpp"
#include "cmax/rounding_opt.hpp"
