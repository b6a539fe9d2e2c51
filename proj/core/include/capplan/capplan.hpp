#pragma once

#include "capplan/des.hpp"
#include "capplan/errors.hpp"
#include "capplan/model.hpp"
#include "capplan/report.hpp"
#include "capplan/scenario.hpp"
