#include <istream>
#include <ostream>
#include <string>

#include <fmt/format.h>

#include "hashbench/report.hpp"

namespace hashbench {

namespace {

constexpr const char* kHeader =
    "protocol,dataset,method,metric,n_label,h,bits,k,fold,run,value,std,accuracy,skipped,config";
constexpr std::size_t kColumns = 15;

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line, std::size_t line_no) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        fields.back() += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.emplace_back();
    } else if (ch != '\r') {
      fields.back() += ch;
    }
  }
  if (quoted) throw FormatError(fmt::format("report line {}: unterminated quote", line_no));
  return fields;
}

std::string config_echo(const ProtocolReport& r) {
  std::string out;
  for (const auto& [k, v] : r.config) {
    if (!out.empty()) out += ';';
    out += k + "=" + v;
  }
  return out;
}

std::string bits_field(const ProtocolReport& r) {
  return r.code_size_bits ? std::to_string(*r.code_size_bits) : "";
}

double parse_double(const std::string& s, std::size_t line_no) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw FormatError(fmt::format("report line {}: '{}' is not a number", line_no, s));
}

std::size_t parse_size(const std::string& s, std::size_t line_no) {
  try {
    std::size_t used = 0;
    const auto v = std::stoull(s, &used);
    if (used == s.size()) return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
  }
  throw FormatError(fmt::format("report line {}: '{}' is not a count", line_no, s));
}

bool same_report(const ProtocolReport& r, const std::vector<std::string>& f) {
  return r.protocol == f[0] && r.dataset == f[1] && r.method == f[2] && r.metric == f[3] &&
         std::to_string(r.n_label) == f[4] && std::to_string(r.h) == f[5] &&
         bits_field(r) == f[6] && std::to_string(r.k) == f[7];
}

}  // namespace

void write_report_csv(std::ostream& out, std::span<const ProtocolReport> reports) {
  out << kHeader << '\n';
  for (const auto& r : reports) {
    const std::string prefix =
        fmt::format("{},{},{},{},{},{},{},{}", quote(r.protocol), quote(r.dataset),
                    quote(r.method), quote(r.metric), r.n_label, r.h, bits_field(r), r.k);
    for (const auto& run : r.runs) {
      out << prefix
          << fmt::format(",{},{},{:.8f},,{},{},\n", run.fold, run.run, run.value,
                         run.accuracy ? fmt::format("{:.8f}", *run.accuracy) : std::string(),
                         run.skipped_queries);
    }
    out << prefix << fmt::format(",all,all,{:.8f},{:.8f},,,{}\n", r.mean, r.stddev,
                                 quote(config_echo(r)));
  }
}

std::vector<ProtocolReport> read_report_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.substr(0, std::string(kHeader).size()) != kHeader) {
    throw FormatError("report CSV: missing or unexpected header");
  }
  std::vector<ProtocolReport> out;
  bool open = false;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto f = split_csv_line(line, line_no);
    if (f.size() != kColumns) {
      throw FormatError(fmt::format("report line {}: expected {} columns, got {}", line_no,
                                    kColumns, f.size()));
    }
    if (!open || !same_report(out.back(), f)) {
      ProtocolReport r;
      r.protocol = f[0];
      r.dataset = f[1];
      r.method = f[2];
      r.metric = f[3];
      r.n_label = parse_size(f[4], line_no);
      r.h = parse_size(f[5], line_no);
      if (!f[6].empty()) r.code_size_bits = parse_size(f[6], line_no);
      r.k = parse_size(f[7], line_no);
      out.push_back(std::move(r));
      open = true;
    }
    auto& r = out.back();
    if (f[8] == "all") {
      r.mean = parse_double(f[10], line_no);
      r.stddev = parse_double(f[11], line_no);
      std::size_t pos = 0;
      const std::string& echo = f[14];
      while (pos < echo.size()) {
        const auto end = std::min(echo.find(';', pos), echo.size());
        const auto item = echo.substr(pos, end - pos);
        const auto eq = item.find('=');
        if (eq == std::string::npos) {
          throw FormatError(fmt::format("report line {}: bad config entry '{}'", line_no, item));
        }
        r.config.emplace_back(item.substr(0, eq), item.substr(eq + 1));
        pos = end + 1;
      }
      open = false;
    } else {
      RunRecord run;
      run.fold = static_cast<int>(parse_size(f[8], line_no));
      run.run = static_cast<int>(parse_size(f[9], line_no));
      run.value = parse_double(f[10], line_no);
      if (!f[12].empty()) run.accuracy = parse_double(f[12], line_no);
      run.skipped_queries = parse_size(f[13], line_no);
      r.runs.push_back(run);
    }
  }
  if (open) throw FormatError("report CSV: last report has no aggregate row");
  return out;
}

void write_markdown_table(std::ostream& out, std::span<const ProtocolReport> reports) {
  out << "| Features | n_label | h | Method | bits | mAP |\n";
  out << "|---|---:|---:|---|---:|---|\n";
  for (const auto& r : reports) {
    out << fmt::format("| {} | {} | {} | {} | {} | {:.1f} ± {:.1f}{} |\n", r.dataset,
                       r.n_label ? std::to_string(r.n_label) : "-",
                       r.h ? std::to_string(r.h) : "-", r.method,
                       r.code_size_bits ? std::to_string(*r.code_size_bits) : "-", 100.0 * r.mean,
                       100.0 * r.stddev, r.metric == "mAP" ? "" : " (" + r.metric + ")");
  }
}

void write_curve_csv(std::ostream& out, std::span<const CurvePoint> curve) {
  out << "bytes_per_image,accuracy\n";
  for (const auto& p : curve) out << fmt::format("{:.4f},{:.8f}\n", p.bytes_per_image, p.accuracy);
}

}  // namespace hashbench
