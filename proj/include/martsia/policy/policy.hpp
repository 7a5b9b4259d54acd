#pragma once

#include <cstddef>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "martsia/error.hpp"
#include "martsia/group/field.hpp"

namespace martsia::policy {

/// `name@authority`; names never contain '@', so the joined form is unique.
struct AttributeLiteral {
  std::string attribute;
  std::string authority;

  std::string to_string() const { return attribute + "@" + authority; }
  static AttributeLiteral parse(std::string_view text);

  friend auto operator<=>(const AttributeLiteral&, const AttributeLiteral&) = default;
  friend bool operator==(const AttributeLiteral&, const AttributeLiteral&) = default;
};

using LiteralSet = std::set<AttributeLiteral>;

/// Syntax or compile error with the 0-based character offset it refers to.
class PolicyError : public Error {
 public:
  PolicyError(std::size_t position, const std::string& message)
      : Error(ErrorCode::Malformed, message + " at position " + std::to_string(position)),
        position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// A policy literal: `Attr@Auth` names one authority, `Attr@n+` asks for at
/// least n distinct authorities.
struct PolicyLiteral {
  std::string attribute;
  std::string authority;  // empty when threshold-qualified
  unsigned at_least = 0;  // 0 when authority-qualified
  std::size_t position = 0;

  bool is_threshold() const { return at_least > 0; }
};

struct PolicyNode {
  enum class Kind { Literal, And, Or };
  Kind kind = Kind::Literal;
  PolicyLiteral literal;
  std::shared_ptr<const PolicyNode> left, right;
};

/// Immutable parsed policy. Equality is structural and ignores positions.
class PolicyAst {
 public:
  PolicyAst() = default;
  explicit PolicyAst(std::shared_ptr<const PolicyNode> root) : root_(std::move(root)) {}

  static PolicyAst literal(PolicyLiteral lit);
  static PolicyAst conjunction(PolicyAst lhs, PolicyAst rhs);
  static PolicyAst disjunction(PolicyAst lhs, PolicyAst rhs);

  const PolicyNode& root() const { return *root_; }
  bool empty() const { return root_ == nullptr; }
  std::size_t literal_count() const;

  friend bool operator==(const PolicyAst& a, const PolicyAst& b);

 private:
  std::shared_ptr<const PolicyNode> root_;
};

/// 'and' binds tighter than 'or', both left-associative; keywords are
/// case-insensitive, names are case-sensitive.
PolicyAst parse(std::string_view text);

/// Minimal-parenthesis canonical text; parse(print(a)) == a.
std::string print(const PolicyAst& ast);

/// Whitespace-normalised form used as a dictionary key.
std::string normalize(std::string_view text);

/// Monotone formula over attribute literals with threshold gates.
struct Formula {
  enum class Kind { Literal, And, Or, Threshold };
  Kind kind = Kind::Literal;
  AttributeLiteral literal;
  unsigned threshold = 0;  // Threshold only
  std::vector<Formula> children;

  std::size_t leaf_count() const;
};

/// `Attr@n+` becomes a threshold gate over (Attr, a) for every authority a.
Formula expand(const PolicyAst& ast, const std::vector<std::string>& authorities);

bool satisfied(const Formula& formula, const LiteralSet& owned);

/// Boolean oracle: truth of expand(ast) when exactly `owned` holds.
bool evaluate(const PolicyAst& ast, const LiteralSet& owned,
              const std::vector<std::string>& authorities);

/// Compiled linear secret-sharing matrix over the scalar field: a row
/// subset spans (1, 0, ..., 0) iff its labels satisfy the source formula.
struct AccessStructure {
  std::vector<std::vector<group::Fr>> matrix;
  std::vector<AttributeLiteral> row_labels;
  std::string policy_text;
  std::vector<std::string> authorities;

  std::size_t rows() const { return matrix.size(); }
  std::size_t width() const { return matrix.empty() ? 0 : matrix.front().size(); }
  std::vector<group::Fr> target() const;
  /// Authorities referenced by at least one row.
  std::set<std::string> referenced_authorities() const;
  /// Indices of rows whose label is in `owned`.
  std::vector<std::size_t> rows_for(const LiteralSet& owned) const;
};

/// Lewko-Waters insertion for and/or, Vandermonde rows at points 1..m for
/// threshold gates.
AccessStructure compile_lsss(const Formula& formula);

/// parse -> expand -> compile_lsss.
AccessStructure compile_policy(std::string_view text, const std::vector<std::string>& authorities);

/// Literals mentioned anywhere in the expanded formula.
LiteralSet formula_literals(const Formula& formula);

}  // namespace martsia::policy
