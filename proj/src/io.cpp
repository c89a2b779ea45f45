#include "sentio/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace sentio {

namespace {

using nlohmann::json;

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open input file: " + path.string());
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open output file: " + path.string());
  return out;
}

// Minimal CSV splitter with double-quote escaping.
std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

Article article_from_json(const json& j, std::size_t line) {
  try {
    Article a;
    a.entity_id = j.at("entity_id").get<std::string>();
    a.timestamp = parse_instant(j.at("ts").get<std::string>());
    a.probs = ProbabilityTriple::ingest(j.at("p_pos").get<double>(), j.at("p_neg").get<double>(),
                                        j.at("p_neu").get<double>());
    a.category = j.value("category", std::string("default"));
    if (j.contains("embedding")) {
      a.embedding = j.at("embedding").get<std::vector<double>>();
      double norm = 0.0;
      for (double v : a.embedding) norm += v * v;
      if (!a.embedding.empty() && norm <= 0.0)
        throw std::invalid_argument("embedding has zero norm");
    }
    a.title = j.value("title", std::string());
    return a;
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad article record: ") + e.what(), line);
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("bad article record: ") + e.what(), line);
  }
}

void check_embedding_dims(const std::vector<Article>& articles) {
  std::size_t dim = 0;
  for (const Article& a : articles) {
    if (a.embedding.empty()) continue;
    if (dim == 0) dim = a.embedding.size();
    if (a.embedding.size() != dim)
      throw std::runtime_error("inconsistent embedding dimensions across articles");
  }
}

}  // namespace

std::string format_value(double v) {
  if (is_missing(v)) return "NA";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<Article> load_articles_jsonl(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  std::vector<Article> articles;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("malformed JSON: ") + e.what(), line_no);
    }
    articles.push_back(article_from_json(j, line_no));
  }
  check_embedding_dims(articles);
  return articles;
}

std::vector<Article> load_articles_csv(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  std::vector<Article> articles;
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    std::vector<std::string> fields = split_csv(line);
    if (header.empty()) {
      header = fields;
      if (header.size() < 6 || header[0] != "entity_id" || header[1] != "ts")
        throw ParseError("expected header entity_id,ts,p_pos,p_neg,p_neu,category[,title]",
                         line_no);
      continue;
    }
    if (fields.size() < 6) throw ParseError("too few CSV fields", line_no);
    try {
      Article a;
      a.entity_id = fields[0];
      a.timestamp = parse_instant(fields[1]);
      a.probs =
          ProbabilityTriple::ingest(std::stod(fields[2]), std::stod(fields[3]), std::stod(fields[4]));
      a.category = fields[5];
      if (fields.size() > 6) a.title = fields[6];
      articles.push_back(std::move(a));
    } catch (const std::exception& e) {
      throw ParseError(std::string("bad article row: ") + e.what(), line_no);
    }
  }
  return articles;
}

std::vector<Article> load_articles(const std::filesystem::path& path) {
  const std::string ext = path.extension().string();
  if (ext == ".csv") return load_articles_csv(path);
  return load_articles_jsonl(path);
}

std::vector<PriceRow> load_prices_csv(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  std::vector<PriceRow> rows;
  std::string line;
  std::size_t line_no = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    std::vector<std::string> fields = split_csv(line);
    if (!saw_header) {
      saw_header = true;
      if (fields.size() < 3 || fields[0] != "entity_id")
        throw ParseError("expected header entity_id,date,close", line_no);
      continue;
    }
    if (fields.size() < 3) throw ParseError("too few price fields", line_no);
    try {
      PriceRow r;
      r.entity_id = fields[0];
      r.date = parse_instant(fields[1]);
      r.close = std::stod(fields[2]);
      if (!(r.close > 0.0)) throw std::invalid_argument("nonpositive close");
      rows.push_back(std::move(r));
    } catch (const std::exception& e) {
      throw ParseError(std::string("bad price row: ") + e.what(), line_no);
    }
  }
  return rows;
}

void write_articles_jsonl(const std::filesystem::path& path, std::span<const Article> articles) {
  std::ofstream out = open_output(path);
  for (const Article& a : articles) {
    json j;
    j["entity_id"] = a.entity_id;
    j["ts"] = format_instant(a.timestamp);
    j["p_pos"] = a.probs.p_pos;
    j["p_neg"] = a.probs.p_neg;
    j["p_neu"] = a.probs.p_neu;
    j["category"] = a.category;
    if (!a.embedding.empty()) j["embedding"] = a.embedding;
    if (!a.title.empty()) j["title"] = a.title;
    out << j.dump() << '\n';
  }
}

void write_prices_csv(const std::filesystem::path& path, std::span<const PriceRow> prices) {
  std::ofstream out = open_output(path);
  out << "entity_id,date,close\n";
  for (const PriceRow& r : prices)
    out << r.entity_id << ',' << format_date(r.date) << ',' << format_value(r.close) << '\n';
}

void write_series_csv(const std::filesystem::path& path, const GridSpec& grid,
                      const EntityStages& stages) {
  std::ofstream out = open_output(path);
  out << "bin,start,end,count,aggregated,filled,smoothed\n";
  for (std::size_t k = 0; k < grid.size(); ++k) {
    out << k << ',' << format_instant(grid.bin_start(k)) << ',' << format_instant(grid.bin_end(k))
        << ',' << stages.aggregated.series.counts[k] << ','
        << format_value(stages.aggregated.series.values[k]) << ','
        << format_value(stages.filled.series.values[k]) << ','
        << format_value(stages.smoothed.series.values[k]) << '\n';
  }
}

void write_metrics_json(const std::filesystem::path& path, const LabelFreeReport& report) {
  json j;
  j["entities"] = report.entity_ids;
  json cols = json::object();
  for (const MetricColumn& c : report.columns) {
    json col;
    json values = json::array();
    for (double v : c.values) {
      if (is_missing(v))
        values.push_back(nullptr);
      else
        values.push_back(v);
    }
    col["values"] = values;
    col["summary"] = {{"median", c.summary.median}, {"iqr", c.summary.iqr},
                      {"mean", c.summary.mean},     {"std", c.summary.std},
                      {"q10", c.summary.q10},       {"q90", c.summary.q90},
                      {"n_entities", c.summary.n_entities},
                      {"n_excluded", c.summary.n_excluded}};
    cols[c.name] = col;
  }
  j["metrics"] = cols;
  std::ofstream out = open_output(path);
  out << j.dump(2) << '\n';
}

namespace {

std::string fixed6(double v) {
  if (is_missing(v)) return "NA";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

std::string render_metrics_table(const LabelFreeReport& report) {
  std::ostringstream os;
  os << "metric                median       IQR      mean       std       q10       q90    n  excl\n";
  for (const MetricColumn& c : report.columns) {
    char line[200];
    std::snprintf(line, sizeof(line), "%-20s %9s %9s %9s %9s %9s %9s %4d %5d\n", c.name.c_str(),
                  fixed6(c.summary.median).c_str(), fixed6(c.summary.iqr).c_str(),
                  fixed6(c.summary.mean).c_str(), fixed6(c.summary.std).c_str(),
                  fixed6(c.summary.q10).c_str(), fixed6(c.summary.q90).c_str(),
                  c.summary.n_entities, c.summary.n_excluded);
    os << line;
  }
  return os.str();
}

void write_manifest_csv(const std::filesystem::path& path, const SweepSpec& sweep) {
  std::ofstream out = open_output(path);
  out << "config_id,config_hash,summary\n";
  for (std::size_t i = 0; i < sweep.size(); ++i) {
    const PipelineConfig cfg = sweep.config_at(i);
    out << sweep.label(i) << ',' << config_hash(cfg) << ",\"" << config_summary(cfg) << "\"\n";
  }
}

void write_consistency_csv(const std::filesystem::path& path,
                           std::span<const ConsistencyRow> rows) {
  std::ofstream out = open_output(path);
  out << "config_id,n_entities,ccf_lag,ccf_rho,granger_sp_pct,mid_coh,dtw_mean,score\n";
  for (const ConsistencyRow& r : rows) {
    out << r.config_id << ',' << r.n_entities << ',' << r.ccf_lag << ','
        << format_value(r.ccf_rho) << ',' << format_value(r.granger_sp_pct) << ','
        << format_value(r.mid_coh) << ',' << format_value(r.dtw_mean) << ','
        << format_value(r.score) << '\n';
  }
}

std::string render_design_table(std::span<const DesignRow> rows) {
  std::ostringstream os;
  os << "stage        component    method                 metric        "
        "d_median     d_iqr    d_mean     d_std     d_q10     d_q90\n";
  for (const DesignRow& r : rows) {
    char line[240];
    if (r.is_baseline) {
      std::snprintf(line, sizeof(line),
                    "%-12s %-12s %-22s %-12s %9s %9s %9s %9s %9s %9s  (baseline levels)\n",
                    r.stage.c_str(), r.component.c_str(), r.method.c_str(), r.metric.c_str(),
                    fixed6(r.absolute.median).c_str(), fixed6(r.absolute.iqr).c_str(),
                    fixed6(r.absolute.mean).c_str(), fixed6(r.absolute.std).c_str(),
                    fixed6(r.absolute.q10).c_str(), fixed6(r.absolute.q90).c_str());
    } else {
      std::snprintf(line, sizeof(line), "%-12s %-12s %-22s %-12s %9s %9s %9s %9s %9s %9s\n",
                    r.stage.c_str(), r.component.c_str(), r.method.c_str(), r.metric.c_str(),
                    fixed6(r.d_median).c_str(), fixed6(r.d_iqr).c_str(), fixed6(r.d_mean).c_str(),
                    fixed6(r.d_std).c_str(), fixed6(r.d_q10).c_str(), fixed6(r.d_q90).c_str());
    }
    os << line;
  }
  return os.str();
}

void write_design_csv(const std::filesystem::path& path, std::span<const DesignRow> rows) {
  std::ofstream out = open_output(path);
  out << "stage,component,method,metric,is_baseline,median,iqr,mean,std,q10,q90,"
         "d_median,d_iqr,d_mean,d_std,d_q10,d_q90\n";
  for (const DesignRow& r : rows) {
    out << r.stage << ',' << r.component << ',' << r.method << ',' << r.metric << ','
        << (r.is_baseline ? 1 : 0) << ',' << format_value(r.absolute.median) << ','
        << format_value(r.absolute.iqr) << ',' << format_value(r.absolute.mean) << ','
        << format_value(r.absolute.std) << ',' << format_value(r.absolute.q10) << ','
        << format_value(r.absolute.q90) << ',' << format_value(r.d_median) << ','
        << format_value(r.d_iqr) << ',' << format_value(r.d_mean) << ','
        << format_value(r.d_std) << ',' << format_value(r.d_q10) << ','
        << format_value(r.d_q90) << '\n';
  }
}

std::uint64_t file_digest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot digest missing file: " + path.string());
  std::uint64_t h = 14695981039346656037ull;
  char buf[4096];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ull;
    }
  }
  return h;
}

}  // namespace sentio
