#include "lofdrf/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <set>
#include <unordered_map>

#include "lofdrf/error.hpp"
#include "lofdrf/io.hpp"

namespace lofdrf {
namespace {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

std::string trimmed(std::string_view s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  size_t e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string lowered(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = char(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// RFC 4180 with two liberties: unquoted fields are trimmed, and blank
// records (empty lines) are dropped.
std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false, field_quoted = false;
  auto end_field = [&] {
    record.push_back(field_quoted ? field : trimmed(field));
    field.clear();
    field_quoted = false;
  };
  auto end_record = [&] {
    end_field();
    if (record.size() > 1 || !record[0].empty()) records.push_back(std::move(record));
    record.clear();
  };
  for (size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"' && trimmed(field).empty() && !field_quoted) {
      in_quotes = true;
      field_quoted = true;
      field.clear();
    } else if (c == ',') {
      end_field();
    } else if (c == '\n') {
      end_record();
    } else {
      field += c;
    }
  }
  if (in_quotes) throw InputError("malformed csv: unterminated quoted field");
  if (!field.empty() || field_quoted || !record.empty()) end_record();
  return records;
}

bool is_missing(const std::string& cell) { return cell.empty() || cell == "?"; }

Dataset load_csv_text(const std::string& name, const std::string& text,
                      const std::string& label_column, const SchemaOverride& overrides) {
  auto records = parse_csv(text);
  if (records.empty()) throw InputError("empty file: " + name);
  const auto& header = records[0];
  size_t ncols = header.size();
  if (ncols < 2) throw InputError("need at least one feature column plus the label column");
  if (records.size() < 2) throw InputError("empty body: no data rows after the header");

  {
    std::set<std::string> seen;
    for (const auto& h : header) {
      if (!seen.insert(h).second) throw InputError("duplicate column name: '" + h + "'");
    }
  }
  for (size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != ncols) {
      throw InputError("ragged row: record " + std::to_string(r) + " has " +
                       std::to_string(records[r].size()) + " fields, expected " +
                       std::to_string(ncols));
    }
  }

  size_t label_idx = ncols;
  for (size_t c = 0; c < ncols; ++c) {
    if (header[c] == label_column) {
      label_idx = c;
      break;
    }
  }
  if (label_idx == ncols) {
    auto idx = parse_double(label_column);
    if (idx && *idx >= 0 && *idx < double(ncols) && *idx == std::floor(*idx)) {
      label_idx = size_t(*idx);
    }
  }
  if (label_idx == ncols) throw InputError("label column absent: '" + label_column + "'");

  for (const auto& [col, kind] : overrides) {
    (void)kind;
    auto it = std::find(header.begin(), header.end(), col);
    if (it == header.end()) throw InputError("schema override names unknown column: '" + col + "'");
    if (size_t(it - header.begin()) == label_idx) {
      throw InputError("schema override cannot target the label column: '" + col + "'");
    }
  }

  Dataset d;
  d.name = name;
  d.label_name = header[label_idx];
  size_t n = records.size() - 1;

  // labels first, then feature columns
  std::unordered_map<std::string, int32_t> label_ids;
  d.labels.reserve(n);
  for (size_t r = 0; r < n; ++r) {
    const std::string& cell = records[r + 1][label_idx];
    if (is_missing(cell)) throw InputError("missing class label in record " + std::to_string(r + 1));
    auto [it, inserted] = label_ids.try_emplace(cell, int32_t(d.class_labels.size()));
    if (inserted) d.class_labels.push_back(cell);
    d.labels.push_back(it->second);
  }
  if (d.class_labels.size() < 2) {
    throw InputError("degenerate labels: column '" + d.label_name +
                     "' has a single distinct value");
  }

  for (size_t c = 0; c < ncols; ++c) {
    if (c == label_idx) continue;
    FeatureSpec spec;
    spec.name = header[c];

    auto forced = overrides.find(spec.name);
    bool numeric;
    if (forced != overrides.end()) {
      numeric = forced->second == FeatureKind::numeric;
    } else {
      numeric = true;
      for (size_t r = 0; r < n && numeric; ++r) {
        const std::string& cell = records[r + 1][c];
        if (is_missing(cell)) continue;
        auto v = parse_double(cell);
        if (!v || !std::isfinite(*v)) numeric = false;
      }
    }

    std::vector<double> col(n);
    if (numeric) {
      spec.kind = FeatureKind::numeric;
      for (size_t r = 0; r < n; ++r) {
        const std::string& cell = records[r + 1][c];
        if (is_missing(cell)) {
          col[r] = kMissing;
          continue;
        }
        auto v = parse_double(cell);
        if (!v || !std::isfinite(*v)) {
          throw InputError("column '" + spec.name + "' forced numeric but value '" + cell +
                           "' is not a finite number (record " + std::to_string(r + 1) + ")");
        }
        col[r] = *v;
      }
    } else {
      spec.kind = FeatureKind::categorical;
      std::unordered_map<std::string, int32_t> cat_ids;
      for (size_t r = 0; r < n; ++r) {
        const std::string& raw = records[r + 1][c];
        const std::string cell = is_missing(raw) ? "?" : raw;  // missing is its own category
        auto [it, inserted] = cat_ids.try_emplace(cell, int32_t(spec.categories.size()));
        if (inserted) spec.categories.push_back(cell);
        col[r] = double(it->second);
      }
    }
    d.features.push_back(std::move(spec));
    d.columns.push_back(std::move(col));
  }
  if (d.features.empty()) throw InputError("no feature columns besides the label");
  return d;
}

// Splits an ARFF data line on commas outside single or double quotes.
std::vector<std::string> split_arff_values(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  char quote = 0;
  for (char c : line) {
    if (quote != 0) {
      if (c == quote) {
        quote = 0;
      } else {
        cur += c;
      }
    } else if (c == '\'' || c == '"') {
      quote = c;
    } else if (c == ',') {
      out.push_back(trimmed(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (quote != 0) throw InputError("malformed arff: unterminated quote in data line");
  out.push_back(trimmed(cur));
  return out;
}

std::string csv_quote(const std::string& field) {
  bool needs = field.find_first_of(",\"\n") != std::string::npos ||
               (!field.empty() && (field.front() == ' ' || field.back() == ' '));
  if (!needs) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

Dataset load_csv(const std::filesystem::path& path, const std::string& label_column,
                 const SchemaOverride& overrides) {
  if (!std::filesystem::exists(path)) throw InputError("missing file: " + path.string());
  return load_csv_text(path.stem().string(), read_text_file(path), label_column, overrides);
}

std::string arff_to_csv(const std::string& text) {
  std::vector<std::string> names;
  std::vector<std::string> data_lines;
  bool in_data = false;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t eol = text.find('\n', pos);
    std::string line = trimmed(text.substr(pos, eol == std::string::npos ? eol : eol - pos));
    pos = eol == std::string::npos ? text.size() + 1 : eol + 1;
    if (line.empty() || line[0] == '%') continue;
    if (in_data) {
      if (line[0] == '{') throw InputError("sparse arff data is not supported");
      data_lines.push_back(line);
      continue;
    }
    std::string low = lowered(line);
    if (low.rfind("@relation", 0) == 0) continue;
    if (low.rfind("@data", 0) == 0) {
      in_data = true;
      continue;
    }
    if (low.rfind("@attribute", 0) != 0) throw InputError("malformed arff line: " + line);

    std::string rest = trimmed(line.substr(10));
    std::string attr_name;
    if (!rest.empty() && (rest[0] == '\'' || rest[0] == '"')) {
      char q = rest[0];
      size_t close = rest.find(q, 1);
      if (close == std::string::npos) throw InputError("malformed arff attribute: " + line);
      attr_name = rest.substr(1, close - 1);
      rest = trimmed(rest.substr(close + 1));
    } else {
      size_t ws = rest.find_first_of(" \t");
      if (ws == std::string::npos) throw InputError("malformed arff attribute: " + line);
      attr_name = rest.substr(0, ws);
      rest = trimmed(rest.substr(ws));
    }
    if (rest.empty()) throw InputError("malformed arff attribute: " + line);
    if (rest[0] != '{') {
      std::string kind = lowered(rest);
      if (kind != "numeric" && kind != "real" && kind != "integer") {
        throw InputError("unsupported arff attribute type: " + rest);
      }
    }
    names.push_back(attr_name);
  }
  if (names.empty() || !in_data || data_lines.empty()) {
    throw InputError("arff file has no attributes or no data");
  }

  std::string csv;
  for (size_t i = 0; i < names.size(); ++i) {
    if (i) csv += ',';
    csv += csv_quote(names[i]);
  }
  csv += '\n';
  for (const auto& line : data_lines) {
    auto values = split_arff_values(line);
    for (size_t i = 0; i < values.size(); ++i) {
      if (i) csv += ',';
      csv += csv_quote(values[i]);
    }
    csv += '\n';
  }
  return csv;
}

Dataset load_table(const std::filesystem::path& path, const std::string& label_column,
                   const SchemaOverride& overrides) {
  if (!std::filesystem::exists(path)) throw InputError("missing file: " + path.string());
  if (lowered(path.extension().string()) == ".arff") {
    return load_csv_text(path.stem().string(), arff_to_csv(read_text_file(path)), label_column,
                         overrides);
  }
  return load_csv(path, label_column, overrides);
}

SchemaOverride parse_schema_file(const std::filesystem::path& path) {
  SchemaOverride out;
  std::string text = read_text_file(path);
  size_t pos = 0;
  size_t line_no = 0;
  while (pos <= text.size()) {
    size_t eol = text.find('\n', pos);
    std::string line = trimmed(text.substr(pos, eol == std::string::npos ? eol : eol - pos));
    pos = eol == std::string::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    size_t colon = line.rfind(':');
    if (colon == std::string::npos || colon == 0) {
      throw InputError("schema file line " + std::to_string(line_no) + " is not 'name:kind'");
    }
    std::string name = trimmed(line.substr(0, colon));
    std::string kind = lowered(trimmed(line.substr(colon + 1)));
    FeatureKind k;
    if (kind == "numeric") {
      k = FeatureKind::numeric;
    } else if (kind == "categorical") {
      k = FeatureKind::categorical;
    } else {
      throw InputError("schema file line " + std::to_string(line_no) + ": unknown kind '" + kind +
                       "' (use numeric or categorical)");
    }
    if (!out.emplace(name, k).second) {
      throw InputError("schema file repeats column '" + name + "'");
    }
  }
  return out;
}

SplitPair holdout_split(const Dataset& d, double train_fraction, uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw InputError("train fraction out of range: must be in (0, 1)");
  }
  size_t n = d.n_rows();
  if (n < 2) throw InputError("need at least 2 rows to split");

  std::vector<size_t> perm(n);
  for (size_t i = 0; i < n; ++i) perm[i] = i;
  Rng rng(seed);
  rng.shuffle(perm);

  auto train_n = size_t(std::llround(train_fraction * double(n)));
  train_n = std::clamp<size_t>(train_n, 1, n - 1);

  SplitPair out;
  out.seed = seed;
  out.train_fraction = train_fraction;
  out.train_indices.assign(perm.begin(), perm.begin() + ptrdiff_t(train_n));
  out.test_indices.assign(perm.begin() + ptrdiff_t(train_n), perm.end());
  std::sort(out.train_indices.begin(), out.train_indices.end());
  std::sort(out.test_indices.begin(), out.test_indices.end());
  out.train = subset_rows(d, out.train_indices);
  out.test = subset_rows(d, out.test_indices);

  auto medians = train_medians(out.train);
  impute_missing(out.train, medians);
  impute_missing(out.test, medians);
  return out;
}

BootstrapSample bootstrap_sample(size_t n, Rng& rng) {
  if (n < 1) throw InputError("cannot bootstrap an empty dataset");
  BootstrapSample s;
  s.in_bag.reserve(n);
  std::vector<uint8_t> seen(n, 0);
  for (size_t i = 0; i < n; ++i) {
    auto pick = size_t(rng.below(n));
    s.in_bag.push_back(pick);
    seen[pick] = 1;
  }
  for (size_t i = 0; i < n; ++i) {
    if (!seen[i]) s.out_of_bag.push_back(i);
  }
  return s;
}

std::vector<double> train_medians(const Dataset& d) {
  std::vector<double> medians(d.n_features(), 0.0);
  for (size_t f = 0; f < d.n_features(); ++f) {
    if (d.features[f].kind != FeatureKind::numeric) continue;
    std::vector<double> vals;
    vals.reserve(d.n_rows());
    for (double v : d.columns[f]) {
      if (!std::isnan(v)) vals.push_back(v);
    }
    if (vals.empty()) continue;  // all-missing column: impute with 0.0
    std::sort(vals.begin(), vals.end());
    size_t m = vals.size();
    medians[f] = (m % 2 == 1) ? vals[m / 2] : (vals[m / 2 - 1] + vals[m / 2]) / 2.0;
  }
  return medians;
}

void impute_missing(Dataset& d, std::span<const double> medians) {
  if (medians.size() != d.n_features()) throw InputError("median table does not match the schema");
  for (size_t f = 0; f < d.n_features(); ++f) {
    if (d.features[f].kind != FeatureKind::numeric) continue;
    for (double& v : d.columns[f]) {
      if (std::isnan(v)) v = medians[f];
    }
  }
}

bool has_missing_numeric(const Dataset& d) {
  for (size_t f = 0; f < d.n_features(); ++f) {
    if (d.features[f].kind != FeatureKind::numeric) continue;
    for (double v : d.columns[f]) {
      if (std::isnan(v)) return true;
    }
  }
  return false;
}

Dataset subset_rows(const Dataset& d, std::span<const size_t> rows) {
  Dataset out;
  out.name = d.name;
  out.features = d.features;
  out.class_labels = d.class_labels;
  out.label_name = d.label_name;
  out.columns.resize(d.n_features());
  for (size_t f = 0; f < d.n_features(); ++f) {
    out.columns[f].reserve(rows.size());
    for (size_t r : rows) out.columns[f].push_back(d.columns[f][r]);
  }
  out.labels.reserve(rows.size());
  for (size_t r : rows) out.labels.push_back(d.labels[r]);
  return out;
}

Dataset remap_to_schema(const Schema& schema, const Dataset& d) {
  std::unordered_map<std::string, size_t> by_name;
  for (size_t f = 0; f < d.n_features(); ++f) by_name[d.features[f].name] = f;

  Dataset out;
  out.name = d.name;
  out.features = schema.features;
  out.class_labels = schema.class_labels;
  out.label_name = schema.label_name;
  out.columns.resize(schema.features.size());

  for (size_t f = 0; f < schema.features.size(); ++f) {
    const FeatureSpec& want = schema.features[f];
    auto it = by_name.find(want.name);
    if (it == by_name.end()) {
      throw InputError("schema mismatch: data lacks feature '" + want.name + "'");
    }
    const FeatureSpec& have = d.features[it->second];
    if (have.kind != want.kind) {
      throw InputError("schema mismatch: feature '" + want.name +
                       "' has a different kind than the model expects");
    }
    const auto& src = d.columns[it->second];
    if (want.kind == FeatureKind::numeric) {
      out.columns[f] = src;
      continue;
    }
    std::vector<int32_t> remap(have.categories.size(), -1);
    for (size_t c = 0; c < have.categories.size(); ++c) {
      auto pos = std::find(want.categories.begin(), want.categories.end(), have.categories[c]);
      if (pos != want.categories.end()) remap[c] = int32_t(pos - want.categories.begin());
    }
    out.columns[f].reserve(src.size());
    for (double v : src) {
      int32_t cat = int32_t(v);
      out.columns[f].push_back(cat < 0 ? -1.0 : double(remap[size_t(cat)]));
    }
  }

  std::unordered_map<std::string, int32_t> label_ids;
  for (size_t i = 0; i < schema.class_labels.size(); ++i) {
    label_ids[schema.class_labels[i]] = int32_t(i);
  }
  out.labels.reserve(d.n_rows());
  for (int32_t lab : d.labels) {
    auto it = label_ids.find(d.class_labels[size_t(lab)]);
    if (it == label_ids.end()) {
      throw InputError("schema mismatch: unknown class label '" + d.class_labels[size_t(lab)] +
                       "'");
    }
    out.labels.push_back(it->second);
  }

  impute_missing(out, schema.medians);
  return out;
}

Schema dataset_schema(const Dataset& d, std::vector<double> medians) {
  return Schema{d.features, d.class_labels, d.label_name, std::move(medians)};
}

}  // namespace lofdrf
