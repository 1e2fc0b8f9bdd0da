#pragma once

#include "odml/data.hpp"
#include "odml/error.hpp"
#include "odml/eval.hpp"
#include "odml/linalg.hpp"
#include "odml/metric.hpp"
#include "odml/model_io.hpp"
#include "odml/optimizer.hpp"
#include "odml/prox_oracle.hpp"
#include "odml/random_matrices.hpp"
#include "odml/regularizers.hpp"
#include "odml/theory.hpp"
