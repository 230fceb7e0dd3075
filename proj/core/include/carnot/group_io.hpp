#ifndef CARNOT_GROUP_IO_HPP
#define CARNOT_GROUP_IO_HPP

#include <optional>
#include <string>

#include "carnot/algebra.hpp"
#include "carnot/catalog.hpp"

namespace carnot {

/// Loads a group spec file:
///   { "name": string, "v1_dim": q1, "v2_dim": q2,
///     "brackets": [ { "i": int, "j": int, "coeffs": [q2 reals] }, ... ],
///     "v1_blocks": [ [ints], ... ] }                          (optional)
/// Indices are 1-based with i < j; unlisted pairs vanish. The loaded tensor
/// must generate the second layer or input_error is raised.
StepTwoAlgebra load_group_spec(const std::string& path);

/// Loads a pairing matrix from JSON: plain row arrays [[...], ...] or an
/// object { "A": [[...], ...] }.
PairingMatrix load_pairing_matrix(const std::string& path);

/// A resolved --group argument.
struct GroupHandle {
  StepTwoAlgebra algebra;
  std::optional<PairingMatrix> pairing;  ///< present exactly for ga groups
  std::string descriptor;
  std::string family;  ///< heisenberg | free | star | ga | file
  int k = 0;           ///< family parameter where meaningful
};

/// Resolves "heisenberg", "free:<k>", "star:<k>", "ga:<file>", or a path to
/// a group spec file.
GroupHandle parse_group_descriptor(const std::string& descriptor);

}  // namespace carnot

#endif
