#pragma once

#include "roelab/errors.hpp"
#include "roelab/index_set.hpp"
#include "roelab/metric_space.hpp"
#include "roelab/coarse_map.hpp"
#include "roelab/op_norm.hpp"
#include "roelab/banded_operator.hpp"
#include "roelab/approximation.hpp"
#include "roelab/projection_family.hpp"
#include "roelab/bvls.hpp"
#include "roelab/vector_measure.hpp"
#include "roelab/localization.hpp"
#include "roelab/parallel.hpp"
#include "roelab/rigidity.hpp"
#include "roelab/generators.hpp"
#include "roelab/json_io.hpp"
