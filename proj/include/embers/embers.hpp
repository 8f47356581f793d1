#pragma once

#include "embers/assignment.hpp"
#include "embers/baserate.hpp"
#include "embers/date.hpp"
#include "embers/domain.hpp"
#include "embers/pipeline.hpp"
#include "embers/report.hpp"
#include "embers/scoring.hpp"
#include "embers/surprise.hpp"
#include "embers/synthetic.hpp"
