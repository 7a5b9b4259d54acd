#include "martsia/policy/policy.hpp"

#include <algorithm>
#include <cctype>
#include <functional>

namespace martsia::policy {
namespace {

bool is_name_char(char c) {
  const auto u = static_cast<unsigned char>(c);
  return std::isalnum(u) || c == '_' || c == '-' || c == '.';
}

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

struct Token {
  enum class Kind { LParen, RParen, And, Or, Literal, End };
  Kind kind;
  std::size_t position;
  PolicyLiteral literal;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  Token next() {
    while (pos_ < text_.size() && is_space(text_[pos_])) ++pos_;
    const std::size_t start = pos_;
    if (pos_ == text_.size()) return {Token::Kind::End, start, {}};
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      return {Token::Kind::LParen, start, {}};
    }
    if (c == ')') {
      ++pos_;
      return {Token::Kind::RParen, start, {}};
    }
    if (!is_name_char(c)) throw PolicyError(start, std::string("unexpected character '") + c + "'");

    const std::string_view word = read_name();
    if (pos_ < text_.size() && text_[pos_] == '@') {
      ++pos_;
      return {Token::Kind::Literal, start, read_qualifier(std::string(word), start)};
    }
    if (iequals(word, "and")) return {Token::Kind::And, start, {}};
    if (iequals(word, "or")) return {Token::Kind::Or, start, {}};
    throw PolicyError(start, "expected '@' after attribute '" + std::string(word) + "'");
  }

 private:
  std::string_view read_name() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && is_name_char(text_[pos_])) ++pos_;
    return text_.substr(start, pos_ - start);
  }

  PolicyLiteral read_qualifier(std::string attribute, std::size_t literal_pos) {
    const std::size_t qpos = pos_;
    const std::string_view q = read_name();
    const bool plus = pos_ < text_.size() && text_[pos_] == '+';
    if (plus) ++pos_;
    if (q.empty()) throw PolicyError(qpos, "malformed qualifier: missing authority or count");
    if (pos_ < text_.size() && !is_space(text_[pos_]) && text_[pos_] != '(' &&
        text_[pos_] != ')') {
      throw PolicyError(pos_, "malformed qualifier");
    }
    PolicyLiteral lit;
    lit.attribute = std::move(attribute);
    lit.position = literal_pos;
    const bool numeric = std::all_of(q.begin(), q.end(), [](char ch) {
      return std::isdigit(static_cast<unsigned char>(ch)) != 0;
    });
    if (plus) {
      if (!numeric) throw PolicyError(qpos, "malformed qualifier: '+' requires a count");
      if (q.size() > 6) throw PolicyError(qpos, "malformed qualifier: count too large");
      const unsigned n = static_cast<unsigned>(std::stoul(std::string(q)));
      if (n == 0) throw PolicyError(qpos, "malformed qualifier: count must be at least 1");
      lit.at_least = n;
    } else {
      if (numeric) throw PolicyError(qpos, "malformed qualifier: count needs a trailing '+'");
      lit.authority = std::string(q);
    }
    return lit;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : lexer_(text) { advance(); }

  PolicyAst parse_all() {
    if (current_.kind == Token::Kind::End) throw PolicyError(current_.position, "empty policy");
    PolicyAst ast = parse_or();
    if (current_.kind == Token::Kind::RParen) {
      throw PolicyError(current_.position, "unbalanced ')'");
    }
    if (current_.kind != Token::Kind::End) {
      throw PolicyError(current_.position, "expected 'and', 'or' or end of policy");
    }
    return ast;
  }

 private:
  void advance() { current_ = lexer_.next(); }

  PolicyAst parse_or() {
    PolicyAst lhs = parse_and();
    while (current_.kind == Token::Kind::Or) {
      advance();
      lhs = PolicyAst::disjunction(std::move(lhs), parse_and());
    }
    return lhs;
  }

  PolicyAst parse_and() {
    PolicyAst lhs = parse_primary();
    while (current_.kind == Token::Kind::And) {
      advance();
      lhs = PolicyAst::conjunction(std::move(lhs), parse_primary());
    }
    return lhs;
  }

  PolicyAst parse_primary() {
    switch (current_.kind) {
      case Token::Kind::Literal: {
        PolicyAst lit = PolicyAst::literal(current_.literal);
        advance();
        return lit;
      }
      case Token::Kind::LParen: {
        const std::size_t open = current_.position;
        advance();
        if (current_.kind == Token::Kind::RParen) throw PolicyError(current_.position, "empty parentheses");
        PolicyAst inner = parse_or();
        if (current_.kind != Token::Kind::RParen) {
          throw PolicyError(open, "unbalanced '(' ");
        }
        advance();
        return inner;
      }
      case Token::Kind::End:
        throw PolicyError(current_.position, "unexpected end of policy");
      case Token::Kind::RParen:
        throw PolicyError(current_.position, "unbalanced ')'");
      default:
        throw PolicyError(current_.position, "expected a literal or '('");
    }
  }

  Lexer lexer_;
  Token current_{};
};

bool nodes_equal(const PolicyNode& a, const PolicyNode& b) {
  if (a.kind != b.kind) return false;
  if (a.kind == PolicyNode::Kind::Literal) {
    return a.literal.attribute == b.literal.attribute &&
           a.literal.authority == b.literal.authority && a.literal.at_least == b.literal.at_least;
  }
  return nodes_equal(*a.left, *b.left) && nodes_equal(*a.right, *b.right);
}

std::string literal_text(const PolicyLiteral& lit) {
  if (lit.is_threshold()) return lit.attribute + "@" + std::to_string(lit.at_least) + "+";
  return lit.attribute + "@" + lit.authority;
}

int precedence(PolicyNode::Kind k) {
  switch (k) {
    case PolicyNode::Kind::Or: return 1;
    case PolicyNode::Kind::And: return 2;
    case PolicyNode::Kind::Literal: return 3;
  }
  return 0;
}

void print_node(const PolicyNode& node, std::string& out) {
  if (node.kind == PolicyNode::Kind::Literal) {
    out += literal_text(node.literal);
    return;
  }
  const int prec = precedence(node.kind);
  const bool left_parens = precedence(node.left->kind) < prec;
  // left-associative: an equal-precedence right child must keep its grouping
  const bool right_parens = precedence(node.right->kind) <= prec;
  if (left_parens) out += "(";
  print_node(*node.left, out);
  if (left_parens) out += ")";
  out += node.kind == PolicyNode::Kind::And ? " and " : " or ";
  if (right_parens) out += "(";
  print_node(*node.right, out);
  if (right_parens) out += ")";
}

}  // namespace

AttributeLiteral AttributeLiteral::parse(std::string_view text) {
  const auto at = text.find('@');
  if (at == std::string_view::npos || at == 0 || at + 1 == text.size() ||
      text.find('@', at + 1) != std::string_view::npos) {
    throw Error(ErrorCode::Malformed, "attribute literal must look like name@authority: " +
                                          std::string(text));
  }
  const auto name = text.substr(0, at);
  const auto auth = text.substr(at + 1);
  if (!std::all_of(name.begin(), name.end(), is_name_char) ||
      !std::all_of(auth.begin(), auth.end(), is_name_char)) {
    throw Error(ErrorCode::Malformed, "invalid character in attribute literal: " + std::string(text));
  }
  return {std::string(name), std::string(auth)};
}

PolicyAst PolicyAst::literal(PolicyLiteral lit) {
  auto node = std::make_shared<PolicyNode>();
  node->kind = PolicyNode::Kind::Literal;
  node->literal = std::move(lit);
  return PolicyAst(std::move(node));
}

PolicyAst PolicyAst::conjunction(PolicyAst lhs, PolicyAst rhs) {
  auto node = std::make_shared<PolicyNode>();
  node->kind = PolicyNode::Kind::And;
  node->left = std::move(lhs.root_);
  node->right = std::move(rhs.root_);
  return PolicyAst(std::move(node));
}

PolicyAst PolicyAst::disjunction(PolicyAst lhs, PolicyAst rhs) {
  auto node = std::make_shared<PolicyNode>();
  node->kind = PolicyNode::Kind::Or;
  node->left = std::move(lhs.root_);
  node->right = std::move(rhs.root_);
  return PolicyAst(std::move(node));
}

std::size_t PolicyAst::literal_count() const {
  std::function<std::size_t(const PolicyNode&)> count = [&](const PolicyNode& n) -> std::size_t {
    if (n.kind == PolicyNode::Kind::Literal) return 1;
    return count(*n.left) + count(*n.right);
  };
  return root_ ? count(*root_) : 0;
}

bool operator==(const PolicyAst& a, const PolicyAst& b) {
  if (a.empty() || b.empty()) return a.empty() == b.empty();
  return nodes_equal(*a.root_, *b.root_);
}

PolicyAst parse(std::string_view text) { return Parser(text).parse_all(); }

std::string print(const PolicyAst& ast) {
  std::string out;
  if (!ast.empty()) print_node(ast.root(), out);
  return out;
}

std::string normalize(std::string_view text) {
  std::string out;
  bool pending_space = false;
  for (char c : text) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space && c != ')' && out.back() != '(') out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

std::size_t Formula::leaf_count() const {
  if (kind == Kind::Literal) return 1;
  std::size_t n = 0;
  for (const auto& c : children) n += c.leaf_count();
  return n;
}

Formula expand(const PolicyAst& ast, const std::vector<std::string>& authorities) {
  std::function<Formula(const PolicyNode&)> walk = [&](const PolicyNode& node) -> Formula {
    Formula f;
    switch (node.kind) {
      case PolicyNode::Kind::And:
      case PolicyNode::Kind::Or:
        f.kind = node.kind == PolicyNode::Kind::And ? Formula::Kind::And : Formula::Kind::Or;
        f.children.push_back(walk(*node.left));
        f.children.push_back(walk(*node.right));
        return f;
      case PolicyNode::Kind::Literal:
        break;
    }
    const PolicyLiteral& lit = node.literal;
    if (!lit.is_threshold()) {
      if (std::find(authorities.begin(), authorities.end(), lit.authority) == authorities.end()) {
        throw PolicyError(lit.position, "unknown authority '" + lit.authority + "'");
      }
      f.kind = Formula::Kind::Literal;
      f.literal = {lit.attribute, lit.authority};
      return f;
    }
    if (lit.at_least > authorities.size()) {
      throw PolicyError(lit.position, "threshold " + std::to_string(lit.at_least) +
                                          " exceeds the " + std::to_string(authorities.size()) +
                                          " available authorities");
    }
    if (authorities.size() == 1) {
      f.kind = Formula::Kind::Literal;
      f.literal = {lit.attribute, authorities.front()};
      return f;
    }
    f.kind = Formula::Kind::Threshold;
    f.threshold = lit.at_least;
    for (const auto& auth : authorities) {
      Formula leaf;
      leaf.kind = Formula::Kind::Literal;
      leaf.literal = {lit.attribute, auth};
      f.children.push_back(std::move(leaf));
    }
    return f;
  };
  if (ast.empty()) throw Error(ErrorCode::Malformed, "empty policy");
  return walk(ast.root());
}

bool satisfied(const Formula& formula, const LiteralSet& owned) {
  switch (formula.kind) {
    case Formula::Kind::Literal:
      return owned.contains(formula.literal);
    case Formula::Kind::And:
      return std::all_of(formula.children.begin(), formula.children.end(),
                         [&](const Formula& c) { return satisfied(c, owned); });
    case Formula::Kind::Or:
      return std::any_of(formula.children.begin(), formula.children.end(),
                         [&](const Formula& c) { return satisfied(c, owned); });
    case Formula::Kind::Threshold: {
      const auto n = std::count_if(formula.children.begin(), formula.children.end(),
                                   [&](const Formula& c) { return satisfied(c, owned); });
      return static_cast<unsigned>(n) >= formula.threshold;
    }
  }
  return false;
}

bool evaluate(const PolicyAst& ast, const LiteralSet& owned,
              const std::vector<std::string>& authorities) {
  return satisfied(expand(ast, authorities), owned);
}

LiteralSet formula_literals(const Formula& formula) {
  LiteralSet out;
  std::function<void(const Formula&)> walk = [&](const Formula& f) {
    if (f.kind == Formula::Kind::Literal) {
      out.insert(f.literal);
      return;
    }
    for (const auto& c : f.children) walk(c);
  };
  walk(formula);
  return out;
}

std::vector<group::Fr> AccessStructure::target() const {
  std::vector<group::Fr> t(width(), group::Fr::zero());
  if (!t.empty()) t[0] = group::Fr::one();
  return t;
}

std::set<std::string> AccessStructure::referenced_authorities() const {
  std::set<std::string> out;
  for (const auto& l : row_labels) out.insert(l.authority);
  return out;
}

std::vector<std::size_t> AccessStructure::rows_for(const LiteralSet& owned) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < row_labels.size(); ++i) {
    if (owned.contains(row_labels[i])) out.push_back(i);
  }
  return out;
}

AccessStructure compile_lsss(const Formula& formula) {
  using group::Fr;
  struct Row {
    std::vector<Fr> vec;
    AttributeLiteral label;
  };
  std::vector<Row> rows;
  std::size_t columns = 1;

  std::function<void(const Formula&, std::vector<Fr>)> walk = [&](const Formula& f,
                                                                   std::vector<Fr> vec) {
    switch (f.kind) {
      case Formula::Kind::Literal:
        rows.push_back({std::move(vec), f.literal});
        return;
      case Formula::Kind::Or:
        for (const auto& c : f.children) walk(c, vec);
        return;
      case Formula::Kind::And: {
        // binary AND: (v, 1) and (0, ..., 0, -1); wider ANDs chain the same gadget
        std::vector<Fr> current = std::move(vec);
        for (std::size_t i = 0; i + 1 < f.children.size(); ++i) {
          current.resize(columns, Fr::zero());
          std::vector<Fr> left = current;
          left.push_back(Fr::one());
          std::vector<Fr> right(columns, Fr::zero());
          right.push_back(-Fr::one());
          ++columns;
          walk(f.children[i], std::move(left));
          current = std::move(right);
        }
        walk(f.children.back(), std::move(current));
        return;
      }
      case Formula::Kind::Threshold: {
        // child i gets (v, x_i, x_i^2, ..., x_i^(k-1)) with x_i = i + 1
        vec.resize(columns, Fr::zero());
        const std::size_t extra = f.threshold - 1;
        columns += extra;
        for (std::size_t i = 0; i < f.children.size(); ++i) {
          std::vector<Fr> child = vec;
          const Fr x = Fr::from_u64(i + 1);
          Fr power = Fr::one();
          for (std::size_t j = 0; j < extra; ++j) {
            power *= x;
            child.push_back(power);
          }
          walk(f.children[i], std::move(child));
        }
        return;
      }
    }
  };
  walk(formula, {Fr::one()});

  AccessStructure out;
  for (auto& r : rows) {
    r.vec.resize(columns, Fr::zero());
    out.matrix.push_back(std::move(r.vec));
    out.row_labels.push_back(std::move(r.label));
  }
  return out;
}

AccessStructure compile_policy(std::string_view text, const std::vector<std::string>& authorities) {
  const PolicyAst ast = parse(text);
  AccessStructure s = compile_lsss(expand(ast, authorities));
  s.policy_text = normalize(text);
  s.authorities = authorities;
  return s;
}

}  // namespace martsia::policy
