#pragma once

#include "hypercurv/error.hpp"
#include "hypercurv/linalg.hpp"
#include "hypercurv/exprlang.hpp"
#include "hypercurv/chart.hpp"
#include "hypercurv/spectrum.hpp"
#include "hypercurv/chen.hpp"
#include "hypercurv/verifiers.hpp"
#include "hypercurv/catalog.hpp"
#include "hypercurv/report.hpp"
