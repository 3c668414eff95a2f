#pragma once

//! Umbrella header: operator-valued kernels on trivialized bundles, their
//! span calculus, connection/curvature geometry, coherent-frame quantization,
//! the stock models, and the report-producing check runner.

#include "opk/core/types.hpp"
#include "opk/core/numdiff.hpp"
#include "opk/core/linalg.hpp"
#include "opk/core/rng.hpp"
#include "opk/core/kernel.hpp"

#include "opk/rkhs/gram.hpp"
#include "opk/rkhs/span.hpp"
#include "opk/rkhs/feature.hpp"

#include "opk/geometry/connection.hpp"
#include "opk/geometry/curvature.hpp"
#include "opk/geometry/bracket.hpp"
#include "opk/geometry/flow.hpp"

#include "opk/quantization/frame.hpp"
#include "opk/quantization/generator.hpp"
#include "opk/quantization/propagate.hpp"
#include "opk/quantization/ks.hpp"
#include "opk/quantization/gauge.hpp"

#include "opk/models/bidisc.hpp"
#include "opk/models/moment.hpp"
#include "opk/models/registry.hpp"

#include "opk/report/report.hpp"
#include "opk/cli/runner.hpp"
