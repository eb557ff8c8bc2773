#pragma once

#include "tpn/rational.hpp"
#include "tpn/net.hpp"
#include "tpn/parser.hpp"
#include "tpn/dbm.hpp"
#include "tpn/semantics.hpp"
#include "tpn/pclass.hpp"
#include "tpn/aclass.hpp"
#include "tpn/agglomeration.hpp"
#include "tpn/explorer.hpp"
#include "tpn/report.hpp"
#include "tpn/validation.hpp"
