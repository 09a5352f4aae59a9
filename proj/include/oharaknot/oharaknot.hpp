#pragma once

#include "oharaknot/core.hpp"
#include "oharaknot/curve.hpp"
#include "oharaknot/energy.hpp"
#include "oharaknot/io.hpp"
#include "oharaknot/seminorm.hpp"
#include "oharaknot/tangentmap.hpp"
