#pragma once

#include "lptrans/error.hpp"
#include "lptrans/geometry.hpp"
#include "lptrans/pointset.hpp"
#include "lptrans/lpfunc.hpp"
#include "lptrans/fit.hpp"
#include "lptrans/translate_system.hpp"
#include "lptrans/haar.hpp"
