#pragma once

#include "modglue/cstar.hpp"
#include "modglue/datum.hpp"
#include "modglue/errors.hpp"
#include "modglue/gen.hpp"
#include "modglue/glue.hpp"
#include "modglue/hmod.hpp"
#include "modglue/io.hpp"
#include "modglue/morita.hpp"
#include "modglue/numlin.hpp"
#include "modglue/oracle.hpp"
#include "modglue/suite.hpp"
#include "modglue/tensor.hpp"
