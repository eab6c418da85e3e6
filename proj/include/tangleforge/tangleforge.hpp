#pragma once

#include "tangleforge/analytic.hpp"
#include "tangleforge/bloch.hpp"
#include "tangleforge/errors.hpp"
#include "tangleforge/io.hpp"
#include "tangleforge/linalg.hpp"
#include "tangleforge/measures.hpp"
#include "tangleforge/qstate.hpp"
#include "tangleforge/roof.hpp"
