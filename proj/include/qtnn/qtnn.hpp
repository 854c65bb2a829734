#pragma once

#include "qtnn/linalg.hpp"
#include "qtnn/errors.hpp"
#include "qtnn/qstate.hpp"
#include "qtnn/evolve.hpp"
#include "qtnn/qnn.hpp"
#include "qtnn/train.hpp"
#include "qtnn/entanglement.hpp"
#include "qtnn/baseline.hpp"
#include "qtnn/io.hpp"
#include "qtnn/config.hpp"
#include "qtnn/report.hpp"
#include "qtnn/verify.hpp"
