#include "prefset/formula.hpp"

#include <cctype>

namespace prefset {

Rel negate(Rel rel) {
  switch (rel) {
    case Rel::eq: return Rel::ne;
    case Rel::ne: return Rel::eq;
    case Rel::lt: return Rel::ge;
    case Rel::le: return Rel::gt;
    case Rel::gt: return Rel::le;
    case Rel::ge: return Rel::lt;
  }
  return Rel::eq;
}

bool rel_holds(long lhs, Rel rel, long rhs) {
  switch (rel) {
    case Rel::eq: return lhs == rhs;
    case Rel::ne: return lhs != rhs;
    case Rel::lt: return lhs < rhs;
    case Rel::le: return lhs <= rhs;
    case Rel::gt: return lhs > rhs;
    case Rel::ge: return lhs >= rhs;
  }
  return false;
}

const char* rel_text(Rel rel) {
  switch (rel) {
    case Rel::eq: return "=";
    case Rel::ne: return "!=";
    case Rel::lt: return "<";
    case Rel::le: return "<=";
    case Rel::gt: return ">";
    case Rel::ge: return ">=";
  }
  return "=";
}

Rel rel_from_text(const std::string& text) {
  if (text == "=") return Rel::eq;
  if (text == "!=") return Rel::ne;
  if (text == "<") return Rel::lt;
  if (text == "<=") return Rel::le;
  if (text == ">") return Rel::gt;
  if (text == ">=") return Rel::ge;
  throw std::invalid_argument("unknown relation '" + text + "'");
}

int Formula::connective_count() const {
  int n = 0;
  for (const Node& node : nodes) {
    if (node.kind == Kind::neg) ++n;
    if (node.kind == Kind::conj || node.kind == Kind::disj)
      n += static_cast<int>(node.kids.size()) - 1;
  }
  return n;
}

namespace {

bool nodes_equal(const Formula& a, int ia, const Formula& b, int ib) {
  const Formula::Node& na = a.nodes[ia];
  const Formula::Node& nb = b.nodes[ib];
  if (na.kind != nb.kind) return false;
  switch (na.kind) {
    case Formula::Kind::truth:
      return true;
    case Formula::Kind::cat_atom:
      return na.attr == nb.attr && na.value_index == nb.value_index;
    case Formula::Kind::int_atom:
      return na.attr == nb.attr && na.rel == nb.rel && na.bound == nb.bound;
    default:
      break;
  }
  if (na.kids.size() != nb.kids.size()) return false;
  for (size_t i = 0; i < na.kids.size(); ++i)
    if (!nodes_equal(a, na.kids[i], b, nb.kids[i])) return false;
  return true;
}

}  // namespace

bool Formula::operator==(const Formula& other) const {
  if (root < 0 || other.root < 0) return root == other.root;
  return nodes_equal(*this, root, other, other.root);
}

namespace {

enum class Tok : uint8_t {
  end, ident, number, quoted, lparen, rparen,
  and_op, or_op, not_op, rel
};

struct Token {
  Tok kind = Tok::end;
  std::string text;
  long number = 0;
  Rel rel = Rel::eq;
  int pos = 0;
};

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) { advance(); }

  const Token& peek() const { return tok_; }
  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (i_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[i_])))
      ++i_;
    tok_ = Token{};
    tok_.pos = static_cast<int>(i_);
    if (i_ >= src_.size()) {
      tok_.kind = Tok::end;
      return;
    }
    char c = src_[i_];
    switch (c) {
      case '(': tok_.kind = Tok::lparen; ++i_; return;
      case ')': tok_.kind = Tok::rparen; ++i_; return;
      case '&': tok_.kind = Tok::and_op; ++i_; return;
      case '|': tok_.kind = Tok::or_op; ++i_; return;
      case '!':
        if (i_ + 1 < src_.size() && src_[i_ + 1] == '=') {
          tok_.kind = Tok::rel;
          tok_.rel = Rel::ne;
          i_ += 2;
        } else {
          tok_.kind = Tok::not_op;
          ++i_;
        }
        return;
      case '=': tok_.kind = Tok::rel; tok_.rel = Rel::eq; ++i_; return;
      case '<':
        tok_.kind = Tok::rel;
        if (i_ + 1 < src_.size() && src_[i_ + 1] == '=') {
          tok_.rel = Rel::le;
          i_ += 2;
        } else {
          tok_.rel = Rel::lt;
          ++i_;
        }
        return;
      case '>':
        tok_.kind = Tok::rel;
        if (i_ + 1 < src_.size() && src_[i_ + 1] == '=') {
          tok_.rel = Rel::ge;
          i_ += 2;
        } else {
          tok_.rel = Rel::gt;
          ++i_;
        }
        return;
      case '"': {
        ++i_;
        std::string out;
        while (i_ < src_.size() && src_[i_] != '"') {
          if (src_[i_] == '\\' && i_ + 1 < src_.size()) ++i_;
          out += src_[i_++];
        }
        if (i_ >= src_.size())
          throw ParseError("unterminated string", tok_.pos);
        ++i_;
        tok_.kind = Tok::quoted;
        tok_.text = std::move(out);
        return;
      }
      default:
        break;
    }
    if (c == '-' || std::isdigit(static_cast<unsigned char>(c))) {
      size_t start = i_;
      if (c == '-') ++i_;
      while (i_ < src_.size() &&
             std::isdigit(static_cast<unsigned char>(src_[i_])))
        ++i_;
      if (i_ == start + (c == '-' ? 1u : 0u))
        throw ParseError("stray '-'", tok_.pos);
      tok_.kind = Tok::number;
      tok_.text = src_.substr(start, i_ - start);
      tok_.number = std::stol(tok_.text);
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = i_;
      while (i_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[i_])) ||
              src_[i_] == '_'))
        ++i_;
      tok_.kind = Tok::ident;
      tok_.text = src_.substr(start, i_ - start);
      return;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", tok_.pos);
  }

  const std::string& src_;
  size_t i_ = 0;
  Token tok_;
};

// Grammar (precedence NOT > AND > OR):
//   disj := conj ('|' conj)*
//   conj := unit ('&' unit)*
//   unit := '!' unit | '(' disj ')' | 'true' | atom
//   atom := IDENT REL value
class Parser {
 public:
  Parser(const std::string& src, const AttributeSchema& schema)
      : lex_(src), schema_(schema) {}

  Formula run() {
    f_.root = parse_disj();
    if (lex_.peek().kind != Tok::end)
      throw ParseError("trailing input after formula", lex_.peek().pos);
    return std::move(f_);
  }

 private:
  int add(Formula::Node node) {
    f_.nodes.push_back(std::move(node));
    return static_cast<int>(f_.nodes.size()) - 1;
  }

  int parse_disj() {
    std::vector<int> kids{parse_conj()};
    while (lex_.peek().kind == Tok::or_op) {
      lex_.take();
      kids.push_back(parse_conj());
    }
    if (kids.size() == 1) return kids[0];
    Formula::Node node;
    node.kind = Formula::Kind::disj;
    node.kids = std::move(kids);
    return add(std::move(node));
  }

  int parse_conj() {
    std::vector<int> kids{parse_unit()};
    while (lex_.peek().kind == Tok::and_op) {
      lex_.take();
      kids.push_back(parse_unit());
    }
    if (kids.size() == 1) return kids[0];
    Formula::Node node;
    node.kind = Formula::Kind::conj;
    node.kids = std::move(kids);
    return add(std::move(node));
  }

  int parse_unit() {
    const Token& t = lex_.peek();
    if (t.kind == Tok::not_op) {
      lex_.take();
      Formula::Node node;
      node.kind = Formula::Kind::neg;
      node.kids.push_back(parse_unit());
      return add(std::move(node));
    }
    if (t.kind == Tok::lparen) {
      lex_.take();
      int inner = parse_disj();
      if (lex_.peek().kind != Tok::rparen)
        throw ParseError("expected ')'", lex_.peek().pos);
      lex_.take();
      return inner;
    }
    if (t.kind == Tok::ident && t.text == "true") {
      lex_.take();
      Formula::Node node;
      node.kind = Formula::Kind::truth;
      return add(std::move(node));
    }
    return parse_atom();
  }

  int parse_atom() {
    Token name = lex_.take();
    if (name.kind != Tok::ident)
      throw ParseError("expected attribute name", name.pos);
    int attr = schema_.index_of(name.text);
    if (attr < 0)
      throw ParseError("unknown attribute '" + name.text + "'", name.pos);
    Token rel = lex_.take();
    if (rel.kind != Tok::rel)
      throw ParseError("expected a relation after '" + name.text + "'", rel.pos);
    Token value = lex_.take();
    const AttributeDef& def = schema_.at(attr);
    Formula::Node node;
    node.attr = attr;
    if (def.kind == AttrKind::categorical) {
      if (rel.rel != Rel::eq)
        throw ParseError("categorical attribute '" + name.text +
                             "' only supports '='",
                         rel.pos);
      if (value.kind != Tok::ident && value.kind != Tok::quoted)
        throw ParseError("expected a categorical value", value.pos);
      int vi = schema_.value_index(attr, value.text);
      if (vi < 0)
        throw ParseError("'" + value.text + "' is outside the domain of '" +
                             name.text + "'",
                         value.pos);
      node.kind = Formula::Kind::cat_atom;
      node.value_index = vi;
      node.value_text = value.text;
    } else {
      if (value.kind != Tok::number)
        throw ParseError("expected an integer after '" + name.text + " " +
                             rel_text(rel.rel) + "'",
                         value.pos);
      node.kind = Formula::Kind::int_atom;
      node.rel = rel.rel;
      node.bound = value.number;
    }
    return add(std::move(node));
  }

  Lexer lex_;
  const AttributeSchema& schema_;
  Formula f_;
};

bool is_bare_word(const std::string& s) {
  if (s.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_')
    return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return s != "true";
}

void print_node(const Formula& f, int idx, const AttributeSchema& schema,
                std::string& out) {
  const Formula::Node& node = f.nodes[idx];
  auto print_child = [&](int child, bool parens) {
    if (parens) out += '(';
    print_node(f, child, schema, out);
    if (parens) out += ')';
  };
  auto is_connective = [&](int child) {
    Formula::Kind k = f.nodes[child].kind;
    return k == Formula::Kind::conj || k == Formula::Kind::disj;
  };
  switch (node.kind) {
    case Formula::Kind::truth:
      out += "true";
      break;
    case Formula::Kind::cat_atom:
      out += schema.at(node.attr).name;
      out += " = ";
      if (is_bare_word(node.value_text)) {
        out += node.value_text;
      } else {
        out += '"';
        for (char c : node.value_text) {
          if (c == '"' || c == '\\') out += '\\';
          out += c;
        }
        out += '"';
      }
      break;
    case Formula::Kind::int_atom:
      out += schema.at(node.attr).name;
      out += ' ';
      out += rel_text(node.rel);
      out += ' ';
      out += std::to_string(node.bound);
      break;
    case Formula::Kind::neg:
      out += '!';
      print_child(node.kids[0], is_connective(node.kids[0]));
      break;
    case Formula::Kind::conj:
      for (size_t i = 0; i < node.kids.size(); ++i) {
        if (i) out += " & ";
        print_child(node.kids[i], is_connective(node.kids[i]));
      }
      break;
    case Formula::Kind::disj:
      for (size_t i = 0; i < node.kids.size(); ++i) {
        if (i) out += " | ";
        // nested disj keeps parens; conj binds tighter and needs none
        print_child(node.kids[i],
                    f.nodes[node.kids[i]].kind == Formula::Kind::disj);
      }
      break;
  }
}

bool eval_node(const Formula& f, int idx, const Item& item) {
  const Formula::Node& node = f.nodes[idx];
  switch (node.kind) {
    case Formula::Kind::truth:
      return true;
    case Formula::Kind::cat_atom:
      return item.values[node.attr] == node.value_index;
    case Formula::Kind::int_atom:
      return rel_holds(item.values[node.attr], node.rel, node.bound);
    case Formula::Kind::neg:
      return !eval_node(f, node.kids[0], item);
    case Formula::Kind::conj:
      for (int k : node.kids)
        if (!eval_node(f, k, item)) return false;
      return true;
    case Formula::Kind::disj:
      for (int k : node.kids)
        if (eval_node(f, k, item)) return true;
      return false;
  }
  return false;
}

}  // namespace

Formula parse_formula(const std::string& text, const AttributeSchema& schema) {
  return Parser(text, schema).run();
}

std::string print_formula(const Formula& f, const AttributeSchema& schema) {
  if (f.root < 0) return "";
  std::string out;
  print_node(f, f.root, schema, out);
  return out;
}

bool eval_formula(const Formula& f, const Item& item) {
  return f.root >= 0 && eval_node(f, f.root, item);
}

int count_satisfying(const Formula& f, const Catalog& catalog,
                     const std::vector<int>& subset) {
  int n = 0;
  for (int i : subset)
    if (eval_formula(f, catalog.item(i))) ++n;
  return n;
}

std::vector<uint8_t> satisfier_flags(const Formula& f, const Catalog& catalog) {
  std::vector<uint8_t> flags(catalog.size(), 0);
  for (int i = 0; i < catalog.size(); ++i)
    flags[i] = eval_formula(f, catalog.item(i)) ? 1 : 0;
  return flags;
}

}  // namespace prefset
