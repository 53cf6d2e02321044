#pragma once

#include "ramsey/coloring.hpp"
#include "ramsey/error.hpp"
#include "ramsey/hindman.hpp"
#include "ramsey/instances.hpp"
#include "ramsey/parallel.hpp"
#include "ramsey/pattern.hpp"
#include "ramsey/sat.hpp"
#include "ramsey/search.hpp"
#include "ramsey/semigroup.hpp"
#include "ramsey/structures.hpp"
