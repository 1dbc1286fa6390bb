#pragma once

#include "sparsebench/ensembles.hpp"
#include "sparsebench/errors.hpp"
#include "sparsebench/experiments.hpp"
#include "sparsebench/guarantees.hpp"
#include "sparsebench/linalg.hpp"
#include "sparsebench/matrix.hpp"
#include "sparsebench/recovery.hpp"
#include "sparsebench/rng.hpp"
#include "sparsebench/subsets.hpp"
