#pragma once

#include "carmtab/bignum.hpp"
#include "carmtab/driver.hpp"
#include "carmtab/factor64.hpp"
#include "carmtab/korselt.hpp"
#include "carmtab/largecase.hpp"
#include "carmtab/numtheory.hpp"
#include "carmtab/oracle.hpp"
#include "carmtab/preproduct.hpp"
#include "carmtab/preproducts.hpp"
#include "carmtab/primality.hpp"
#include "carmtab/records.hpp"
#include "carmtab/report.hpp"
#include "carmtab/sieve.hpp"
#include "carmtab/smallcase.hpp"
#include "carmtab/uint128.hpp"
