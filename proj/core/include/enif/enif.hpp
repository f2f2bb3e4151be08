#pragma once

#include "enif/assimilate.hpp"
#include "enif/ensemble.hpp"
#include "enif/error.hpp"
#include "enif/evaluate.hpp"
#include "enif/fem.hpp"
#include "enif/graph.hpp"
#include "enif/ordering.hpp"
#include "enif/permutation.hpp"
#include "enif/random.hpp"
#include "enif/regress.hpp"
#include "enif/simulators.hpp"
#include "enif/sparse.hpp"
#include "enif/transport.hpp"
#include "enif/version.hpp"
