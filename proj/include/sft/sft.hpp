#pragma once

#include "sft/budget.hpp"
#include "sft/config.hpp"
#include "sft/error.hpp"
#include "sft/geometry.hpp"
#include "sft/numerics.hpp"
#include "sft/oracle.hpp"
#include "sft/projector.hpp"
#include "sft/reference.hpp"
#include "sft/report.hpp"
#include "sft/selfcheck.hpp"
