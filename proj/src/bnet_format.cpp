#include "recognet/bnet_format.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "recognet/error.hpp"

namespace recognet {

namespace {

[[noreturn]] void fail(std::size_t line, const std::string& msg) {
  throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + msg);
}

std::vector<std::string_view> split_words(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    const std::size_t start = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

std::size_t parse_index(std::string_view word, std::size_t line, const char* what) {
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(word.data(), word.data() + word.size(), value);
  if (ec != std::errc() || ptr != word.data() + word.size()) {
    fail(line, std::string("expected ") + what + ", got '" + std::string(word) + "'");
  }
  return value;
}

double parse_probability(std::string_view word, std::size_t line) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(word.data(), word.data() + word.size(), value);
  if (ec != std::errc() || ptr != word.data() + word.size() || !std::isfinite(value)) {
    fail(line, "expected probability, got '" + std::string(word) + "'");
  }
  return value;
}

std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

struct PendingRow {
  std::size_t line = 0;
  std::vector<std::size_t> parent_states;  // empty for '-'
  std::vector<double> probs;
};

struct PendingCpt {
  std::size_t line = 0;
  std::vector<PendingRow> rows;
};

}  // namespace

BnetDocument parse_bnet(std::string_view text) {
  std::vector<NodeDecl> nodes;
  std::map<std::string, std::size_t> node_line;
  std::vector<Arc> arcs;
  std::vector<std::pair<std::string, PendingCpt>> cpts;
  std::vector<std::pair<std::string, std::size_t>> evidence_stmts;
  std::vector<std::size_t> evidence_lines;
  std::map<std::string, std::size_t> levels;
  PendingCpt* current = nullptr;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto words = split_words(line);
    if (words.empty()) {
      if (end == text.size()) break;
      continue;
    }
    const std::string_view kw = words[0];

    if (kw == "node") {
      if (words.size() < 3) fail(line_no, "node needs <id> <cardinality>");
      NodeDecl d;
      d.id = std::string(words[1]);
      d.label = d.id;
      d.cardinality = parse_index(words[2], line_no, "cardinality");
      for (std::size_t k = 3; k < words.size(); ++k) d.state_labels.emplace_back(words[k]);
      if (!d.state_labels.empty() && d.state_labels.size() != d.cardinality) {
        fail(line_no, "node '" + d.id + "' lists " + std::to_string(d.state_labels.size()) +
                          " state labels for cardinality " + std::to_string(d.cardinality));
      }
      if (!node_line.emplace(d.id, line_no).second) fail(line_no, "node '" + d.id + "' declared twice");
      nodes.push_back(std::move(d));
      current = nullptr;
    } else if (kw == "arc") {
      if (words.size() != 3) fail(line_no, "arc needs <parent-id> <child-id>");
      arcs.push_back({std::string(words[1]), std::string(words[2])});
      current = nullptr;
    } else if (kw == "cpt") {
      if (words.size() != 2) fail(line_no, "cpt needs <node-id>");
      for (const auto& [id, pending] : cpts)
        if (id == words[1]) fail(line_no, "second cpt for '" + id + "'");
      cpts.emplace_back(std::string(words[1]), PendingCpt{line_no, {}});
      current = &cpts.back().second;
    } else if (kw == "row") {
      if (!current) fail(line_no, "row outside a cpt block");
      PendingRow row;
      row.line = line_no;
      std::size_t k = 1;
      if (k < words.size() && words[k] == "-") {
        ++k;
      } else {
        while (k < words.size() && words[k] != ":") {
          row.parent_states.push_back(parse_index(words[k], line_no, "parent state index"));
          ++k;
        }
      }
      if (k >= words.size() || words[k] != ":") fail(line_no, "row is missing ':'");
      for (++k; k < words.size(); ++k) row.probs.push_back(parse_probability(words[k], line_no));
      current->rows.push_back(std::move(row));
    } else if (kw == "evidence") {
      if (words.size() != 3) fail(line_no, "evidence needs <node-id> <state-index>");
      evidence_stmts.emplace_back(std::string(words[1]), parse_index(words[2], line_no, "state index"));
      evidence_lines.push_back(line_no);
      current = nullptr;
    } else if (kw == "level") {
      if (words.size() != 3) fail(line_no, "level needs <node-id> <n>");
      if (!levels.emplace(std::string(words[1]), parse_index(words[2], line_no, "level")).second) {
        fail(line_no, "second level for '" + std::string(words[1]) + "'");
      }
      current = nullptr;
    } else {
      fail(line_no, "unknown statement '" + std::string(kw) + "'");
    }
    if (end == text.size()) break;
  }

  std::map<std::string, std::size_t> card;
  for (const auto& d : nodes) card[d.id] = d.cardinality;
  std::map<std::string, std::vector<std::string>> parents;
  for (const Arc& a : arcs) parents[a.child].push_back(a.parent);

  std::vector<Cpt> built;
  for (auto& [id, pending] : cpts) {
    if (!card.count(id)) fail(pending.line, "cpt for undeclared node '" + id + "'");
    const auto& ps = parents[id];
    std::vector<std::size_t> cards;
    std::size_t expected_rows = 1;
    for (const auto& p : ps) {
      if (!card.count(p)) fail(pending.line, "arc from undeclared node '" + p + "'");
      cards.push_back(card[p]);
      expected_rows *= card[p];
    }
    Cpt cpt{id, ps, {}};
    std::vector<std::size_t> expect(ps.size(), 0);
    for (std::size_t r = 0; r < pending.rows.size(); ++r) {
      const PendingRow& row = pending.rows[r];
      if (r >= expected_rows) fail(row.line, "extra row for cpt '" + id + "'");
      if (row.parent_states != expect) {
        fail(row.line, "row out of canonical order for cpt '" + id + "' (last parent varies fastest)");
      }
      if (row.probs.size() != card[id]) {
        fail(row.line, "row has " + std::to_string(row.probs.size()) + " probabilities, node '" + id +
                           "' has " + std::to_string(card[id]) + " states");
      }
      double sum = 0.0;
      for (double p : row.probs) sum += p;
      if (std::abs(sum - 1.0) > 1e-9) {
        std::ostringstream msg;
        msg.precision(12);
        msg << "row of cpt '" << id << "' sums to " << sum;
        fail(row.line, msg.str());
      }
      cpt.table.insert(cpt.table.end(), row.probs.begin(), row.probs.end());
      for (std::size_t k = expect.size(); k-- > 0;) {
        if (++expect[k] < cards[k]) break;
        expect[k] = 0;
      }
    }
    if (pending.rows.size() != expected_rows) {
      fail(pending.line, "cpt '" + id + "' has " + std::to_string(pending.rows.size()) + " rows, expected " +
                             std::to_string(expected_rows));
    }
    built.push_back(std::move(cpt));
  }

  BnetDocument doc{build_net(std::move(nodes), std::move(arcs), std::move(built)), {}, {}};
  for (std::size_t k = 0; k < evidence_stmts.size(); ++k) {
    try {
      doc.evidence.observe(evidence_stmts[k].first, evidence_stmts[k].second);
    } catch (const Error& e) {
      fail(evidence_lines[k], e.detail());
    }
  }
  validate_evidence(doc.net, doc.evidence);
  for (const auto& [id, level] : levels) {
    if (!doc.net.find(id)) throw Error(ErrorCode::UnknownNode, "level for undeclared node '" + id + "'");
  }
  doc.levels = std::move(levels);
  return doc;
}

BnetDocument load_bnet(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_bnet(buf.str());
}

std::string serialize_bnet(const BnetDocument& doc) {
  const BayesNet& net = doc.net;
  auto check_word = [](const std::string& w) {
    for (char c : w)
      if (std::isspace(static_cast<unsigned char>(c)) || c == '#' || c == ':') {
        throw Error(ErrorCode::InvalidSpec, "'" + w + "' cannot be written as a BNET word");
      }
  };

  std::string out;
  for (const NodeDecl& d : net.nodes()) {
    check_word(d.id);
    out += "node " + d.id + " " + std::to_string(d.cardinality);
    for (const auto& s : d.state_labels) {
      check_word(s);
      out += " " + s;
    }
    out += '\n';
  }
  for (const Arc& a : net.arcs()) out += "arc " + a.parent + " " + a.child + "\n";
  for (const NodeDecl& d : net.nodes()) {
    auto it = doc.levels.find(d.id);
    if (it != doc.levels.end()) out += "level " + d.id + " " + std::to_string(it->second) + "\n";
  }
  for (std::size_t i = 0; i < net.size(); ++i) {
    out += "cpt " + net.id(i) + "\n";
    const auto ps = net.parents(i);
    std::vector<std::size_t> states(ps.size(), 0);
    for (std::size_t r = 0; r < net.row_count(i); ++r) {
      out += "row";
      if (ps.empty()) out += " -";
      for (std::size_t s : states) out += " " + std::to_string(s);
      out += " :";
      for (double p : net.row(i, r)) out += " " + format_double(p);
      out += '\n';
      for (std::size_t k = states.size(); k-- > 0;) {
        if (++states[k] < net.cardinality(ps[k])) break;
        states[k] = 0;
      }
    }
  }
  for (const NodeDecl& d : net.nodes()) {
    if (auto s = doc.evidence.state_of(d.id)) out += "evidence " + d.id + " " + std::to_string(*s) + "\n";
  }
  return out;
}

}  // namespace recognet
