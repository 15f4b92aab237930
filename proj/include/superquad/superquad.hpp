#pragma once

#include "superquad/errors.hpp"
#include "superquad/linalg.hpp"
#include "superquad/scalar_functions.hpp"
#include "superquad/sharp_constants.hpp"
#include "superquad/bounds.hpp"
#include "superquad/random.hpp"
#include "superquad/json_io.hpp"
#include "superquad/harness.hpp"
#include "superquad/report_json.hpp"
#include "superquad/closed_form_2x2.hpp"
#include "superquad/reproduce.hpp"
