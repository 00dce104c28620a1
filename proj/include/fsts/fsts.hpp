#pragma once

// Umbrella header: Fisher-Shannon plane estimation and complexity-invariant
// distance clustering for uniformly sampled time series.

#include "fsts/cid.hpp"
#include "fsts/config.hpp"
#include "fsts/csv.hpp"
#include "fsts/errors.hpp"
#include "fsts/infoplane.hpp"
#include "fsts/kde.hpp"
#include "fsts/loess.hpp"
#include "fsts/medoids.hpp"
#include "fsts/parallel.hpp"
#include "fsts/pipeline.hpp"
#include "fsts/stl.hpp"
#include "fsts/svg.hpp"
#include "fsts/time_series.hpp"
#include "fsts/timestamp.hpp"
