#pragma once

#include "qwalk/converters.hpp"
#include "qwalk/errors.hpp"
#include "qwalk/generators.hpp"
#include "qwalk/graph.hpp"
#include "qwalk/linalg.hpp"
#include "qwalk/polygon.hpp"
#include "qwalk/reflection.hpp"
#include "qwalk/search.hpp"
#include "qwalk/walks.hpp"
