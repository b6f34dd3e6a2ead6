#pragma once

#include "splittree/builder.hpp"
#include "splittree/disjoint_sets.hpp"
#include "splittree/graph.hpp"
#include "splittree/lbfs.hpp"
#include "splittree/oracle.hpp"
#include "splittree/split_tree.hpp"
#include "splittree/tree_io.hpp"
