#pragma once

#include "segreg/config.hpp"
#include "segreg/error.hpp"
#include "segreg/grid.hpp"
#include "segreg/interpolation.hpp"
#include "segreg/losses.hpp"
#include "segreg/mhd.hpp"
#include "segreg/metrics.hpp"
#include "segreg/optimizer.hpp"
#include "segreg/phantom.hpp"
#include "segreg/prealign.hpp"
#include "segreg/preprocess.hpp"
#include "segreg/pyramid.hpp"
#include "segreg/report.hpp"
#include "segreg/sdm.hpp"
#include "segreg/smoothing.hpp"
