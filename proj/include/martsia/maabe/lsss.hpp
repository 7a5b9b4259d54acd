#pragma once

#include <map>
#include <optional>
#include <vector>

#include "martsia/group/field.hpp"
#include "martsia/policy/policy.hpp"

namespace martsia::maabe {

/// Coefficients c_i with sum c_i * M_i = (1, 0, ..., 0) over the rows in
/// `owned_rows`, or nullopt when those rows do not span the target.
std::optional<std::map<std::size_t, group::Fr>> lsss_reconstruct(
    const policy::AccessStructure& structure, const std::vector<std::size_t>& owned_rows);

}  // namespace martsia::maabe
