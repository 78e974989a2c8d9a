#pragma once

#include "fairstage/core.hpp"
#include "fairstage/errors.hpp"
#include "fairstage/fairness.hpp"
#include "fairstage/instances.hpp"
#include "fairstage/lp_export.hpp"
#include "fairstage/mincost.hpp"
#include "fairstage/oracle.hpp"
#include "fairstage/report.hpp"
#include "fairstage/runner.hpp"
#include "fairstage/sweep.hpp"
