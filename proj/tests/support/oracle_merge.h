// Literal merge chase: duplicate pairs applied one at a time in a seeded
// random order, rewriting both records, until a full pass changes nothing.
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "core/instance.h"
#include "core/mdlang.h"
#include "core/schema.h"
#include "core/value.h"

namespace erblox::testing {

// Final attribute values per relation and rid (key column untouched).
// Listed attributes combine through their matching functions, unlisted
// non-key attributes through prefer-non-null, mirroring the merge contract.
std::map<std::string, std::map<int64_t, std::vector<Value>>> literal_merge(
    const Instance& instance,
    const std::map<std::string, std::vector<std::pair<int64_t, int64_t>>>& dups,
    const md::MDSet& rules, const Schema& schema, uint64_t order_seed);

}  // namespace erblox::testing
