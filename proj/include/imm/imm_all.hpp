#pragma once

#include "imm/error.hpp"
#include "imm/graph.hpp"
#include "imm/imm.hpp"
#include "imm/mc.hpp"
#include "imm/oracle.hpp"
#include "imm/params.hpp"
#include "imm/random.hpp"
#include "imm/rr.hpp"
#include "imm/select.hpp"
