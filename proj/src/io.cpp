#include "matpca/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "matpca/errors.hpp"

namespace matpca {

namespace {

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) {
      if (start < text.size()) lines.push_back(text.substr(start));
      break;
    }
    std::string line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

std::vector<std::string> split_tokens(const std::string& line) {
  std::vector<std::string> tokens;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) tokens.push_back(tok);
  return tokens;
}

double parse_double(const std::string& tok, const std::string& what) {
  errno = 0;
  char* end = nullptr;
  double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0' || errno == ERANGE || !std::isfinite(v))
    throw IoError(what + ": '" + tok + "' is not a finite decimal float");
  return v;
}

long parse_long(const std::string& tok, const std::string& what) {
  errno = 0;
  char* end = nullptr;
  long v = std::strtol(tok.c_str(), &end, 10);
  if (end == tok.c_str() || *end != '\0' || errno == ERANGE)
    throw IoError(what + ": '" + tok + "' is not an integer");
  return v;
}

std::uint64_t parse_u64(const std::string& tok, const std::string& what) {
  errno = 0;
  char* end = nullptr;
  unsigned long long v = std::strtoull(tok.c_str(), &end, 10);
  if (end == tok.c_str() || *end != '\0' || errno == ERANGE)
    throw IoError(what + ": '" + tok + "' is not an unsigned integer");
  return static_cast<std::uint64_t>(v);
}

void append_matrix(std::ostringstream& out, const char* key,
                   const Eigen::MatrixXd& m) {
  out << key;
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      out << ' ' << format_double(m(r, c));
  out << '\n';
}

using KeyMap = std::map<std::string, std::vector<std::string>>;

const std::vector<std::string>& need(const KeyMap& kv, const std::string& key) {
  auto it = kv.find(key);
  if (it == kv.end()) throw IoError("model file: missing key '" + key + "'");
  return it->second;
}

Eigen::MatrixXd read_matrix(const KeyMap& kv, const std::string& key, int rows,
                            int cols) {
  const auto& toks = need(kv, key);
  if (static_cast<long>(toks.size()) != static_cast<long>(rows) * cols)
    throw IoError("model file: key '" + key + "' expects " +
                  std::to_string(static_cast<long>(rows) * cols) + " values, found " +
                  std::to_string(toks.size()));
  Eigen::MatrixXd m(rows, cols);
  std::size_t at = 0;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = parse_double(toks[at++], key);
  return m;
}

long read_long(const KeyMap& kv, const std::string& key) {
  const auto& toks = need(kv, key);
  if (toks.size() != 1) throw IoError("model file: key '" + key + "' expects one value");
  return parse_long(toks[0], key);
}

double read_double(const KeyMap& kv, const std::string& key) {
  const auto& toks = need(kv, key);
  if (toks.size() != 1) throw IoError("model file: key '" + key + "' expects one value");
  return parse_double(toks[0], key);
}

std::string read_word(const KeyMap& kv, const std::string& key) {
  const auto& toks = need(kv, key);
  if (toks.size() != 1) throw IoError("model file: key '" + key + "' expects one value");
  return toks[0];
}

}  // namespace

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void atomic_write_text(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw IoError("short write to '" + tmp + "'");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw IoError("cannot rename '" + tmp + "' to '" + path + "': " +
                  std::strerror(errno));
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("read failure on '" + path + "'");
  return buf.str();
}

std::string dataset_to_text(const MatrixDataset& data) {
  data.validate();
  std::ostringstream out;
  out << "MATDS v1 " << data.n() << ' ' << data.d_c << ' ' << data.d_r << '\n';
  for (const Eigen::MatrixXd& X : data.samples) {
    for (int r = 0; r < data.d_c; ++r) {
      for (int c = 0; c < data.d_r; ++c) {
        if (c) out << ' ';
        out << format_double(X(r, c));
      }
      out << '\n';
    }
  }
  return out.str();
}

MatrixDataset dataset_from_text(const std::string& text) {
  std::vector<std::string> lines = split_lines(text);
  if (lines.empty()) throw IoError("dataset: empty file");
  std::vector<std::string> head = split_tokens(lines[0]);
  if (head.size() != 5 || head[0] != "MATDS" || head[1] != "v1")
    throw IoError("dataset: header must read 'MATDS v1 <n> <d_c> <d_r>'");
  const long n = parse_long(head[2], "dataset n");
  const long d_c = parse_long(head[3], "dataset d_c");
  const long d_r = parse_long(head[4], "dataset d_r");
  if (n < 1 || d_c < 1 || d_r < 1) throw IoError("dataset: invalid header dimensions");

  const long body = n * d_c;
  long non_blank = 0;
  for (std::size_t i = 1; i < lines.size(); ++i)
    if (!split_tokens(lines[i]).empty()) ++non_blank;
  if (non_blank != body)
    throw IoError("dataset: expected " + std::to_string(body) + " body lines, found " +
                  std::to_string(non_blank));

  MatrixDataset data;
  data.d_c = static_cast<int>(d_c);
  data.d_r = static_cast<int>(d_r);
  data.samples.assign(static_cast<std::size_t>(n), Eigen::MatrixXd(d_c, d_r));
  data.ids.resize(static_cast<std::size_t>(n));
  long row = 0;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    std::vector<std::string> toks = split_tokens(lines[i]);
    if (toks.empty()) continue;
    if (static_cast<long>(toks.size()) != d_r)
      throw IoError("dataset: line " + std::to_string(i + 1) + " has " +
                    std::to_string(toks.size()) + " values, expected " +
                    std::to_string(d_r));
    Eigen::MatrixXd& X = data.samples[static_cast<std::size_t>(row / d_c)];
    for (long c = 0; c < d_r; ++c)
      X(row % d_c, c) = parse_double(toks[static_cast<std::size_t>(c)], "dataset value");
    ++row;
  }
  for (long i = 0; i < n; ++i) data.ids[static_cast<std::size_t>(i)] = i;
  return data;
}

void write_dataset(const std::string& path, const MatrixDataset& data) {
  atomic_write_text(path, dataset_to_text(data));
}

MatrixDataset read_dataset(const std::string& path) {
  try {
    return dataset_from_text(read_text_file(path));
  } catch (const IoError& e) {
    throw IoError(path + ": " + e.what());
  }
}

std::string model_to_text(const HrfpcaModel& model) {
  std::ostringstream out;
  out << "MATMODEL v1\n";
  out << "method " << method_name(model.method) << '\n';
  out << "d_c " << model.params.d_c() << '\n';
  out << "d_r " << model.params.d_r() << '\n';
  out << "q_c " << model.q_c << '\n';
  out << "q_r " << model.q_r << '\n';
  out << "centered " << (model.centered_scores ? 1 : 0) << '\n';
  append_matrix(out, "M", model.params.M);
  append_matrix(out, "sigma_c", model.params.sigma_c);
  append_matrix(out, "sigma_r", model.params.sigma_r);
  append_matrix(out, "lambda_c", model.pcs.lambda_c);
  append_matrix(out, "lambda_r", model.pcs.lambda_r);
  append_matrix(out, "U_c", model.pcs.U_c);
  append_matrix(out, "U_r", model.pcs.U_r);
  if (model.mmcd) {
    const MmcdFit& fit = *model.mmcd;
    out << "subset";
    for (int i : fit.subset) out << ' ' << i;
    out << '\n';
    out << "weights";
    for (int w : fit.weights) out << ' ' << w;
    out << '\n';
    out << "raw_objective " << format_double(fit.raw_objective) << '\n';
    const MmcdConfig& c = fit.config_echo;
    out << "config_h " << c.h << '\n';
    out << "config_n_starts " << c.n_starts << '\n';
    out << "config_n_keep " << c.n_keep << '\n';
    out << "config_initial_subset_size " << c.initial_subset_size << '\n';
    out << "config_cstep_inner " << c.cstep_inner_flipflop_iters << '\n';
    out << "config_final_iters " << c.final_flipflop_iters << '\n';
    out << "config_cstep_max " << c.cstep_max << '\n';
    out << "config_tol " << format_double(c.tol) << '\n';
    out << "config_seed " << c.seed << '\n';
  }
  return out.str();
}

HrfpcaModel model_from_text(const std::string& text) {
  std::vector<std::string> lines = split_lines(text);
  if (lines.empty() || split_tokens(lines[0]) != std::vector<std::string>{"MATMODEL", "v1"})
    throw IoError("model file: first line must read 'MATMODEL v1'");

  KeyMap kv;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    std::vector<std::string> toks = split_tokens(lines[i]);
    if (toks.empty()) continue;
    std::string key = toks[0];
    toks.erase(toks.begin());
    if (!kv.emplace(std::move(key), std::move(toks)).second)
      throw IoError("model file: duplicate key on line " + std::to_string(i + 1));
  }

  HrfpcaModel model;
  model.method = parse_method(read_word(kv, "method"));
  const int d_c = static_cast<int>(read_long(kv, "d_c"));
  const int d_r = static_cast<int>(read_long(kv, "d_r"));
  if (d_c < 1 || d_r < 1) throw IoError("model file: invalid shape");
  model.q_c = static_cast<int>(read_long(kv, "q_c"));
  model.q_r = static_cast<int>(read_long(kv, "q_r"));
  if (model.q_c < 1 || model.q_c > d_c || model.q_r < 1 || model.q_r > d_r)
    throw IoError("model file: ranks out of range");
  model.centered_scores = read_long(kv, "centered") != 0;
  model.params.M = read_matrix(kv, "M", d_c, d_r);
  model.params.sigma_c = read_matrix(kv, "sigma_c", d_c, d_c);
  model.params.sigma_r = read_matrix(kv, "sigma_r", d_r, d_r);
  model.pcs.lambda_c = read_matrix(kv, "lambda_c", model.q_c, 1).col(0);
  model.pcs.lambda_r = read_matrix(kv, "lambda_r", model.q_r, 1).col(0);
  model.pcs.U_c = read_matrix(kv, "U_c", d_c, model.q_c);
  model.pcs.U_r = read_matrix(kv, "U_r", d_r, model.q_r);

  if (kv.count("subset")) {
    MmcdFit fit;
    for (const std::string& tok : need(kv, "subset"))
      fit.subset.push_back(static_cast<int>(parse_long(tok, "subset")));
    for (const std::string& tok : need(kv, "weights"))
      fit.weights.push_back(static_cast<int>(parse_long(tok, "weights")));
    fit.raw_objective = read_double(kv, "raw_objective");
    fit.config_echo.h = static_cast<int>(read_long(kv, "config_h"));
    fit.config_echo.n_starts = static_cast<int>(read_long(kv, "config_n_starts"));
    fit.config_echo.n_keep = static_cast<int>(read_long(kv, "config_n_keep"));
    fit.config_echo.initial_subset_size =
        static_cast<int>(read_long(kv, "config_initial_subset_size"));
    fit.config_echo.cstep_inner_flipflop_iters =
        static_cast<int>(read_long(kv, "config_cstep_inner"));
    fit.config_echo.final_flipflop_iters =
        static_cast<int>(read_long(kv, "config_final_iters"));
    fit.config_echo.cstep_max = static_cast<int>(read_long(kv, "config_cstep_max"));
    fit.config_echo.tol = read_double(kv, "config_tol");
    {
      const auto& toks = need(kv, "config_seed");
      if (toks.size() != 1) throw IoError("model file: config_seed expects one value");
      fit.config_echo.seed = parse_u64(toks[0], "config_seed");
    }
    fit.reweighted_params = model.params;
    model.mmcd = std::move(fit);
  }
  return model;
}

void write_model(const std::string& path, const HrfpcaModel& model) {
  atomic_write_text(path, model_to_text(model));
}

HrfpcaModel read_model(const std::string& path) {
  try {
    return model_from_text(read_text_file(path));
  } catch (const IoError& e) {
    throw IoError(path + ": " + e.what());
  }
}

std::string csv_field(const std::string& value) {
  if (value.find_first_of(",\"\n\r") == std::string::npos) return value;
  std::string out = "\"";
  for (char ch : value) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

}  // namespace matpca
