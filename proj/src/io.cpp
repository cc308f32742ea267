#include "likertlv/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string_view>

#include "likertlv/errors.hpp"

namespace likertlv {

namespace {

std::string_view trim_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

bool parse_int(std::string_view text, long& value) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (text.empty()) return false;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  return ec == std::errc() && ptr == text.data() + text.size();
}

bool parse_double(std::string_view text, double& value) {
  if (text.empty()) return false;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  return ec == std::errc() && ptr == text.data() + text.size();
}

std::vector<double> to_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

nlohmann::json cut_rows(const CutPointSet& cuts) {
  nlohmann::json rows = nlohmann::json::array();
  for (int j = 0; j < cuts.items(); ++j) {
    const auto row = cuts.row(j);
    rows.push_back(std::vector<double>(row.begin(), row.end()));
  }
  return rows;
}

nlohmann::json squared_scale(const ModelParams& p) {
  std::vector<double> sigma_sq, tau_sq_signed;
  for (int j = 0; j < p.items(); ++j) {
    sigma_sq.push_back(p.sigma[j] * p.sigma[j]);
    tau_sq_signed.push_back(std::copysign(p.tau[j] * p.tau[j], p.tau[j]));
  }
  return {{"sigma_sq", sigma_sq},
          {"tau_sq_signed", tau_sq_signed},
          {"gamma_sq", to_vector(p.gamma_sq())},
          {"sigma", to_vector(p.sigma)},
          {"tau", to_vector(p.tau)}};
}

Eigen::VectorXd vector_field(const nlohmann::json& doc, const char* name) {
  if (!doc.contains(name) || !doc.at(name).is_array())
    throw InputError(std::string("missing array field '") + name + "'");
  const auto values = doc.at(name).get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

}  // namespace

LikertDataset read_likert_csv(std::istream& in, std::optional<int> num_categories) {
  std::string line;
  if (!std::getline(in, line)) throw InputError("data: empty file");
  if (trim_cr(line) != "subject,item,time,response")
    throw InputError("data: expected header 'subject,item,time,response'");

  struct Row {
    long subject, item, time, response;
  };
  std::vector<Row> rows;
  long max_subject = 0, max_item = 0, max_time = 0, max_response = 0;
  for (long line_no = 2; std::getline(in, line); ++line_no) {
    const std::string_view text = trim_cr(line);
    if (text.empty()) continue;
    const auto fields = split_commas(text);
    Row row{};
    if (fields.size() != 4 || !parse_int(fields[0], row.subject) || !parse_int(fields[1], row.item) ||
        !parse_int(fields[2], row.time) || !parse_int(fields[3], row.response))
      throw InputError("data: line " + std::to_string(line_no) + ": expected four integers");
    if (row.subject < 1 || row.item < 1 || row.time < 1 || row.response < 1)
      throw InputError("data: line " + std::to_string(line_no) + ": indices and responses are 1-based");
    max_subject = std::max(max_subject, row.subject);
    max_item = std::max(max_item, row.item);
    max_time = std::max(max_time, row.time);
    max_response = std::max(max_response, row.response);
    rows.push_back(row);
  }
  if (rows.empty()) throw InputError("data: no responses");
  const long categories = num_categories.value_or(static_cast<int>(max_response));
  if (max_response > categories)
    throw InputError("data: response " + std::to_string(max_response) + " exceeds the category count " +
                     std::to_string(categories));
  if (max_subject * max_item * max_time > 100'000'000L) throw InputError("data: panel too large");

  LikertDataset data;
  data.items = static_cast<int>(max_item);
  data.times = static_cast<int>(max_time);
  data.num_categories = static_cast<int>(categories);
  data.responses = RowMatrixXi::Zero(max_subject, max_item * max_time);
  for (const Row& r : rows) {
    int& cell = data.responses(r.subject - 1, latent_index(static_cast<int>(r.item - 1),
                                                           static_cast<int>(r.time - 1), data.items));
    if (cell != 0)
      throw InputError("data: duplicate response for subject " + std::to_string(r.subject) + ", item " +
                       std::to_string(r.item) + ", time " + std::to_string(r.time));
    cell = static_cast<int>(r.response);
  }

  std::vector<std::string> missing;
  long missing_count = 0;
  for (int i = 0; i < data.subjects(); ++i) {
    for (int j = 0; j < data.items; ++j) {
      for (int t = 0; t < data.times; ++t) {
        if (data.at(i, j, t) != 0) continue;
        if (++missing_count <= 20)
          missing.push_back("(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + "," +
                            std::to_string(t + 1) + ")");
      }
    }
  }
  if (missing_count > 0) {
    std::string msg = "data: incomplete panel, missing (subject,item,time) cells:";
    for (const auto& m : missing) msg += " " + m;
    if (missing_count > 20) msg += " and " + std::to_string(missing_count - 20) + " more";
    throw InputError(msg);
  }
  data.validate();
  return data;
}

LikertDataset read_likert_csv(const std::string& path, std::optional<int> num_categories) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open data file '" + path + "'");
  return read_likert_csv(in, num_categories);
}

void write_likert_csv(std::ostream& out, const LikertDataset& data) {
  out << "subject,item,time,response\n";
  for (int i = 0; i < data.subjects(); ++i)
    for (int j = 0; j < data.items; ++j)
      for (int t = 0; t < data.times; ++t)
        out << i + 1 << ',' << j + 1 << ',' << t + 1 << ',' << data.at(i, j, t) << '\n';
}

nlohmann::json model_to_json(const ModelParams& params, const CutPointSet& cuts) {
  return {{"sigma", to_vector(params.sigma)},
          {"tau", to_vector(params.tau)},
          {"cuts", cut_rows(cuts)},
          {"num_categories", cuts.num_categories}};
}

ModelParams params_from_json(const nlohmann::json& doc) {
  try {
    ModelParams p{vector_field(doc, "sigma"), vector_field(doc, "tau")};
    p.validate();
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("model params: ") + e.what());
  }
}

CutPointSet cuts_from_json(const nlohmann::json& doc) {
  try {
    if (!doc.contains("cuts") || !doc.at("cuts").is_array()) throw InputError("missing array field 'cuts'");
    const auto rows = doc.at("cuts").get<std::vector<std::vector<double>>>();
    if (rows.empty()) throw InputError("cut points: no items");
    const int width = static_cast<int>(rows.front().size());
    CutPointSet cuts;
    cuts.num_categories = doc.contains("num_categories") ? doc.at("num_categories").get<int>() : width + 1;
    cuts.cuts.resize(static_cast<Eigen::Index>(rows.size()), width);
    for (std::size_t j = 0; j < rows.size(); ++j) {
      if (static_cast<int>(rows[j].size()) != width) throw InputError("cut points: ragged rows");
      for (int k = 0; k < width; ++k) cuts.cuts(static_cast<Eigen::Index>(j), k) = rows[j][static_cast<std::size_t>(k)];
    }
    cuts.validate();
    return cuts;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("cut points: ") + e.what());
  }
}

nlohmann::json cuts_to_json(const CutPointSet& cuts) { return cut_rows(cuts); }

nlohmann::json fit_to_json(const FitResult& fit) {
  nlohmann::json doc = squared_scale(fit.params);
  doc["method"] = "cr";
  doc["gamma_sq"] = to_vector(fit.gamma_sq);
  doc["objective"] = fit.objective;
  doc["converged"] = fit.converged;
  return doc;
}

nlohmann::json stem_to_json(const StemChain& chain) {
  nlohmann::json doc = squared_scale(chain.final_params);
  doc["method"] = "stem";
  doc["cuts"] = cut_rows(chain.final_cuts);
  doc["num_categories"] = chain.final_cuts.num_categories;
  doc["iterations"] = chain.sigma_trace.rows();
  doc["burn_in"] = chain.burn_in;
  doc["diagnostics"] = chain.diagnostics;
  return doc;
}

std::vector<std::string> trace_parameter_names(int items, int num_cuts) {
  std::vector<std::string> names;
  for (int j = 1; j <= items; ++j) names.push_back("sigma_" + std::to_string(j));
  for (int j = 1; j <= items; ++j) names.push_back("tau_" + std::to_string(j));
  for (int j = 1; j <= items; ++j)
    for (int k = 1; k <= num_cuts; ++k) names.push_back("z_" + std::to_string(j) + "_" + std::to_string(k));
  return names;
}

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

void write_trace_csv(std::ostream& out, const StemChain& chain) {
  const auto items = static_cast<int>(chain.sigma_trace.cols());
  const int num_cuts = items > 0 ? static_cast<int>(chain.cut_trace.cols()) / items : 0;
  const auto names = trace_parameter_names(items, num_cuts);
  out << "iteration,parameter,value\n";
  for (Eigen::Index r = 0; r < chain.sigma_trace.rows(); ++r) {
    std::size_t n = 0;
    for (int j = 0; j < items; ++j) out << r + 1 << ',' << names[n++] << ',' << format_double(chain.sigma_trace(r, j)) << '\n';
    for (int j = 0; j < items; ++j) out << r + 1 << ',' << names[n++] << ',' << format_double(chain.tau_trace(r, j)) << '\n';
    for (Eigen::Index c = 0; c < chain.cut_trace.cols(); ++c)
      out << r + 1 << ',' << names[n++] << ',' << format_double(chain.cut_trace(r, c)) << '\n';
  }
}

TraceSeries read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim_cr(line) != "iteration,parameter,value")
    throw InputError("trace: expected header 'iteration,parameter,value'");
  TraceSeries series;
  std::map<std::string, std::size_t, std::less<>> position;
  for (long line_no = 2; std::getline(in, line); ++line_no) {
    const std::string_view text = trim_cr(line);
    if (text.empty()) continue;
    const auto fields = split_commas(text);
    long iteration = 0;
    double value = 0.0;
    if (fields.size() != 3 || !parse_int(fields[0], iteration) || fields[1].empty() ||
        !parse_double(fields[2], value))
      throw InputError("trace: line " + std::to_string(line_no) + ": expected iteration,parameter,value");
    auto it = position.find(fields[1]);
    if (it == position.end()) {
      it = position.emplace(std::string(fields[1]), series.size()).first;
      series.emplace_back(std::string(fields[1]), std::vector<double>{});
    }
    series[it->second].second.push_back(value);
  }
  return series;
}

}  // namespace likertlv
