#include "nfg/data.hpp"

#include <zlib.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>

#include "nfg/shuffling.hpp"

namespace nfg {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }

struct Token {
  std::string_view text;
  std::size_t column;  // 1-based start position
};

// Splits one line into whitespace-separated tokens, dropping `#` comments.
std::vector<Token> tokenize(std::string_view line) {
  std::vector<Token> tokens;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && is_space(line[pos])) ++pos;
    if (pos >= line.size() || line[pos] == '#') break;
    const std::size_t start = pos;
    while (pos < line.size() && !is_space(line[pos]) && line[pos] != '#') ++pos;
    tokens.push_back({line.substr(start, pos - start), start + 1});
  }
  return tokens;
}

double parse_double(std::string_view text, std::size_t line_no, std::size_t column) {
  const std::string buf(text);
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(buf.c_str(), &end);
  if (end != buf.c_str() + buf.size() || buf.empty())
    throw ParseError("expected a number, got '" + buf + "'", line_no, column);
  if (!std::isfinite(v))
    throw ParseError("non-finite value '" + buf + "'", line_no, column);
  return v;
}

std::uint64_t parse_index(std::string_view text, std::size_t line_no, std::size_t column) {
  if (text.empty()) throw ParseError("empty feature index", line_no, column);
  std::uint64_t v = 0;
  for (char c : text) {
    if (c < '0' || c > '9')
      throw ParseError("expected a feature index, got '" + std::string(text) + "'",
                       line_no, column);
    v = v * 10 + static_cast<std::uint64_t>(c - '0');
    if (v > 0xffffffffull)
      throw ParseError("feature index out of range", line_no, column);
  }
  return v;
}

}  // namespace

LabeledDataset parse_libsvm(std::istream& in) {
  LabeledDataset ds;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::vector<Token> tokens = tokenize(line);
    if (tokens.empty()) continue;

    ds.labels.push_back(parse_double(tokens[0].text, line_no, tokens[0].column));
    std::vector<SparseEntry> row;
    row.reserve(tokens.size() - 1);
    std::uint64_t prev_index = 0;
    for (std::size_t k = 1; k < tokens.size(); ++k) {
      const std::string_view tok = tokens[k].text;
      const std::size_t colon = tok.find(':');
      if (colon == std::string_view::npos)
        throw ParseError("expected 'index:value', got '" + std::string(tok) + "'",
                         line_no, tokens[k].column);
      const std::uint64_t idx = parse_index(tok.substr(0, colon), line_no, tokens[k].column);
      if (idx == 0)
        throw ParseError("feature indices are 1-based; got 0", line_no, tokens[k].column);
      if (idx <= prev_index)
        throw ParseError("feature indices must be strictly increasing", line_no,
                         tokens[k].column);
      prev_index = idx;
      const double val =
          parse_double(tok.substr(colon + 1), line_no, tokens[k].column + colon + 1);
      row.push_back({static_cast<std::uint32_t>(idx - 1), val});
      ds.dimension = std::max(ds.dimension, static_cast<std::size_t>(idx));
    }
    ds.rows.push_back(std::move(row));
  }
  if (ds.rows.empty()) throw ParseError("no rows", 0, 0);
  return ds;
}

LabeledDataset parse_libsvm(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_libsvm(in);
}

std::string serialize_libsvm(const LabeledDataset& ds) {
  std::string out;
  char buf[64];
  for (std::size_t r = 0; r < ds.rows.size(); ++r) {
    std::snprintf(buf, sizeof buf, "%.17g", ds.labels[r]);
    out += buf;
    for (const SparseEntry& e : ds.rows[r]) {
      std::snprintf(buf, sizeof buf, " %u:%.17g", e.index + 1, e.value);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

namespace {

std::string inflate_gzip(const std::string& raw, const std::string& path) {
  z_stream zs{};
  if (inflateInit2(&zs, 15 + 16) != Z_OK)
    throw std::runtime_error(path + ": failed to initialize gzip decoder");
  std::string out;
  out.reserve(raw.size() * 3);
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(raw.data()));
  zs.avail_in = static_cast<uInt>(raw.size());
  char chunk[1 << 15];
  int rc = Z_OK;
  do {
    zs.next_out = reinterpret_cast<Bytef*>(chunk);
    zs.avail_out = sizeof chunk;
    rc = inflate(&zs, Z_NO_FLUSH);
    if (rc != Z_OK && rc != Z_STREAM_END) {
      inflateEnd(&zs);
      throw std::runtime_error(path + ": corrupt gzip stream");
    }
    out.append(chunk, sizeof chunk - zs.avail_out);
  } while (rc != Z_STREAM_END && zs.avail_in > 0);
  inflateEnd(&zs);
  if (rc != Z_STREAM_END) throw std::runtime_error(path + ": truncated gzip stream");
  return out;
}

}  // namespace

LabeledDataset load_libsvm_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path + ": cannot open file");
  std::string raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw std::runtime_error(path + ": read error");
  if (raw.size() >= 2 && static_cast<unsigned char>(raw[0]) == 0x1f &&
      static_cast<unsigned char>(raw[1]) == 0x8b) {
    raw = inflate_gzip(raw, path);
  }
  try {
    return parse_libsvm(std::string_view(raw));
  } catch (const ParseError& e) {
    throw ParseError(e.description, e.line, e.column, path);
  }
}

void apply_unit_feature_scaling(LabeledDataset& ds) {
  std::vector<double> max_abs(ds.dimension, 0.0);
  for (const auto& row : ds.rows) {
    for (const SparseEntry& e : row)
      max_abs[e.index] = std::max(max_abs[e.index], std::fabs(e.value));
  }
  for (auto& row : ds.rows) {
    for (SparseEntry& e : row) {
      if (max_abs[e.index] > 0.0) e.value /= max_abs[e.index];
    }
  }
}

SigmoidLsqProblem make_sigmoid_problem(const LabeledDataset& ds) {
  if (ds.dimension > 10'000'000)
    throw ContractViolation("dataset dimension " + std::to_string(ds.dimension) +
                            " too large to densify");
  std::vector<ParamVector> rows(ds.size(), zeros(ds.dimension));
  std::vector<double> targets(ds.size());
  for (std::size_t r = 0; r < ds.size(); ++r) {
    for (const SparseEntry& e : ds.rows[r]) rows[r][e.index] = e.value;
    const double y = ds.labels[r];
    if (y == -1.0) {
      targets[r] = 0.0;
    } else if (y == 1.0) {
      targets[r] = 1.0;
    } else if (y >= 0.0 && y <= 1.0) {
      targets[r] = y;
    } else {
      throw ContractViolation("label " + std::to_string(y) +
                              " not mappable to a [0,1] target");
    }
  }
  return SigmoidLsqProblem(std::move(rows), std::move(targets));
}

QuadraticProblem make_quadratic_suite(std::size_t n, std::size_t d, double L, double mu,
                                      std::uint64_t seed) {
  if (!(mu > 0.0) || mu > L) throw ContractViolation("need 0 < mu <= L");
  if (n == 1 && mu != L)
    throw ContractViolation("n = 1 cannot carry both curvature endpoints");
  CounterStream stream(seed);
  std::vector<ParamVector> anchors(n, ParamVector(d));
  for (auto& a : anchors)
    for (double& v : a) v = stream.next_normal();
  std::vector<double> curvatures(n);
  curvatures[0] = L;
  if (n > 1) curvatures[1] = mu;
  for (std::size_t i = 2; i < n; ++i)
    curvatures[i] = mu + (L - mu) * stream.next_double();
  return QuadraticProblem(std::move(anchors), std::move(curvatures));
}

SigmoidLsqProblem make_synthetic_sigmoid(std::size_t n, std::size_t d, std::uint64_t seed) {
  CounterStream stream(seed);
  std::vector<ParamVector> rows(n, ParamVector(d));
  for (auto& r : rows)
    for (double& v : r) v = stream.next_normal();
  ParamVector planted(d);
  for (double& v : planted) v = stream.next_normal();
  std::vector<double> targets(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double p = 1.0 / (1.0 + std::exp(-dot(rows[i], planted)));
    targets[i] = (stream.next_double() < p) ? 1.0 : 0.0;
  }
  return SigmoidLsqProblem(std::move(rows), std::move(targets));
}

std::string make_adult_standin_libsvm(std::size_t n, std::size_t d, std::uint64_t seed) {
  CounterStream stream(seed);
  ParamVector planted(d);
  for (double& v : planted) v = stream.next_normal() / std::sqrt(static_cast<double>(d));
  std::string out;
  char buf[64];
  for (std::size_t r = 0; r < n; ++r) {
    double z = 0.0;
    std::string features;
    for (std::size_t j = 0; j < d; ++j) {
      if (stream.next_double() < 0.125) {
        std::snprintf(buf, sizeof buf, " %zu:1", j + 1);
        features += buf;
        z += planted[j];
      }
    }
    const double p = 1.0 / (1.0 + std::exp(-4.0 * z));
    out += (stream.next_double() < p) ? "+1" : "-1";
    out += features;
    out += '\n';
  }
  return out;
}

}  // namespace nfg
