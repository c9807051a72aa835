#pragma once

#include "fkd/approx.hpp"
#include "fkd/cliquewidth.hpp"
#include "fkd/convex.hpp"
#include "fkd/error.hpp"
#include "fkd/generators.hpp"
#include "fkd/instance.hpp"
#include "fkd/oracle.hpp"
#include "fkd/pq_tree.hpp"
#include "fkd/profile_set.hpp"
#include "fkd/solution.hpp"
#include "fkd/tin.hpp"
#include "fkd/tree_decomposition.hpp"
