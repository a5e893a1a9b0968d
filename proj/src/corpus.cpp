/*
 * Copyright 2026 The numcomp Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "numcomp/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "numcomp/error.hpp"
#include "numcomp/rng.hpp"
#include "numcomp/text.hpp"

namespace numcomp {
namespace {

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

std::string with_thousands(const std::string& digits) {
  const auto dot = digits.find('.');
  std::string whole = digits.substr(0, dot);
  const std::string frac = dot == std::string::npos ? "" : digits.substr(dot);
  for (int i = static_cast<int>(whole.size()) - 3; i > 0; i -= 3) whole.insert(i, ",");
  return whole + frac;
}

AttributeTemplate scalar(std::string name, std::vector<std::string> headers,
                         std::vector<std::string> units, double low, double high, int decimals) {
  return {std::move(name), std::move(headers), std::move(units), Layout::Scalar, low, high, 0.0,
          decimals};
}

AttributeTemplate range(std::string name, std::vector<std::string> headers,
                        std::vector<std::string> units, double low, double high, double width,
                        int decimals) {
  return {std::move(name), std::move(headers), std::move(units), Layout::Range, low, high, width,
          decimals};
}

AttributeTemplate gaussian(std::string name, std::vector<std::string> headers,
                           std::vector<std::string> units, double low, double high, double sd,
                           int decimals) {
  return {std::move(name), std::move(headers), std::move(units), Layout::Gaussian, low, high, sd,
          decimals};
}

}  // namespace

std::string column_id(const std::string& table, std::size_t column) {
  return table + ".c" + std::to_string(column);
}

std::string tuple_id(const std::string& table, std::size_t row) {
  return table + ".r" + std::to_string(row);
}

CorpusSpec default_corpus_spec() {
  const std::vector<std::string> age{"Age", "Patient age", "Age at diagnosis", "Mean age"};
  const std::vector<std::string> weight{"Weight", "Body weight", "Wt", "Body mass"};
  const std::vector<std::string> hr{"Heart rate", "HR", "Pulse", "Pulse rate"};
  const std::vector<std::string> loss{"Blood loss", "EBL", "Estimated blood loss",
                                      "Intraoperative blood loss"};
  const std::vector<std::string> optime{"Operating time", "Operative time", "Surgery duration",
                                        "Duration of surgery"};
  const std::vector<std::string> bp{"BP", "Blood pressure", "Arterial pressure", "Pressure"};
  const std::vector<std::string> hb{"Hemoglobin", "Hb", "Haemoglobin", "Hgb"};
  const std::vector<std::string> tumor{"Tumor size", "Tumour size", "Lesion size",
                                       "Tumor diameter"};
  const std::vector<std::string> fu{"Follow-up", "Follow up", "Follow-up duration",
                                    "Length of follow-up"};
  const std::vector<std::string> cr{"Creatinine", "Serum creatinine", "Cr", "Creat"};

  CorpusSpec spec;
  spec.templates = {
      // Family 0: adult surgical cohort.
      gaussian("age_adult", age, {"years", "yr", "yrs"}, 45, 75, 9.0, 1),
      scalar("weight_adult", weight, {"kg", "Kg", "kgs"}, 55, 110, 1),
      scalar("hr_adult", hr, {"bpm", "beats/min"}, 55, 95, 0),
      scalar("blood_loss_adult", loss, {"mL", "ml", "ML"}, 300, 4000, 0),
      scalar("op_time_adult", optime, {"min", "mins", "minutes"}, 150, 600, 0),
      // Family 1: neonatal cohort, same headers and units.
      gaussian("age_neonatal", age, {"years", "yr", "yrs"}, 0.1, 2, 0.5, 1),
      scalar("weight_neonatal", weight, {"kg", "Kg", "kgs"}, 0.8, 4.5, 2),
      scalar("hr_neonatal", hr, {"bpm", "beats/min"}, 120, 180, 0),
      scalar("blood_loss_neonatal", loss, {"mL", "ml", "ML"}, 2, 40, 0),
      scalar("op_time_neonatal", optime, {"min", "mins", "minutes"}, 10, 45, 0),
      // Family 2: laboratory panel, conventional units.
      range("bp_systolic", bp, {"mmHg", "mm Hg"}, 100, 150, 25, 0),
      gaussian("hb_gdl", hb, {"g/dL", "g/dl"}, 10, 16, 1.5, 1),
      scalar("tumor_cm", tumor, {"cm", "cms"}, 1, 9, 1),
      scalar("followup_months", fu, {"months", "mo", "mos"}, 6, 60, 0),
      scalar("creatinine_mgdl", cr, {"mg/dL", "mg/dl"}, 0.5, 1.6, 2),
      // Family 3: the same panel at another scale or unit.
      range("bp_diastolic", bp, {"mmHg", "mm Hg"}, 40, 70, 15, 0),
      gaussian("hb_gl", hb, {"g/L", "g/l"}, 100, 160, 15, 0),
      scalar("tumor_mm", tumor, {"mm", "millimeters"}, 10, 90, 0),
      scalar("followup_days", fu, {"days", "d"}, 180, 1800, 0),
      scalar("creatinine_umol", cr, {"µmol/L", "umol/L"}, 45, 140, 0),
  };
  spec.families = {{0, 1, 2, 3, 4}, {5, 6, 7, 8, 9}, {10, 11, 12, 13, 14}, {15, 16, 17, 18, 19}};
  return spec;
}

GeneratedCorpus generate_corpus(const CorpusSpec& spec, std::uint64_t seed) {
  if (spec.templates.empty() || spec.families.empty()) {
    fail(ErrorCode::InvalidArgument, "corpus spec needs templates and families");
  }
  if (spec.tables < 1 || spec.rows < 1) {
    fail(ErrorCode::InvalidArgument, "corpus needs at least one table and one row");
  }
  for (const auto& fam : spec.families) {
    if (fam.empty()) fail(ErrorCode::InvalidArgument, "empty table family");
    for (int t : fam) {
      if (t < 0 || t >= static_cast<int>(spec.templates.size())) {
        fail(ErrorCode::IndexOutOfBounds, "family refers to an unknown template");
      }
    }
  }
  Rng rng = substream(seed, "corpus");
  std::uniform_real_distribution<double> unit01(0.0, 1.0);
  auto chance = [&](double p) { return unit01(rng) < p; };
  auto choose = [&](const std::vector<std::string>& options) -> const std::string& {
    std::uniform_int_distribution<std::size_t> pick(0, options.size() - 1);
    return options[pick(rng)];
  };
  auto number = [&](double v, int decimals) {
    std::string s = fixed(v, decimals);
    if (std::fabs(v) >= 1000.0 && chance(spec.thousands_rate)) s = with_thousands(s);
    return s;
  };

  GeneratedCorpus corpus;
  std::map<int, std::vector<std::string>> by_template;
  std::map<std::size_t, std::vector<std::string>> rows_by_family;
  const int width = static_cast<int>(std::log10(std::max(spec.tables - 1, 1))) + 1;
  for (int t = 0; t < spec.tables; ++t) {
    const std::size_t family = static_cast<std::size_t>(t) % spec.families.size();
    std::vector<int> cols = spec.families[family];
    std::shuffle(cols.begin(), cols.end(), rng);
    Table table;
    char name[64];
    std::snprintf(name, sizeof(name), "t%0*d", std::clamp(width, 1, 9), t);
    table.name = name;
    table.rows.assign(static_cast<std::size_t>(spec.rows), {});
    for (std::size_t j = 0; j < cols.size(); ++j) {
      const AttributeTemplate& tpl = spec.templates[static_cast<std::size_t>(cols[j])];
      std::string header = chance(spec.synonym_rate) ? choose(tpl.headers) : tpl.headers.front();
      std::string cell_unit;
      if (!tpl.unit_surfaces.empty() && !chance(spec.missing_unit_rate)) {
        const std::string& unit = choose(tpl.unit_surfaces);
        if (chance(spec.unit_in_header_rate)) {
          header += " (" + unit + ")";
        } else {
          cell_unit = unit;
        }
      }
      table.headers.push_back(header);
      std::uniform_real_distribution<double> base(tpl.low, tpl.high);
      for (auto& row : table.rows) {
        std::string cell;
        const double v = base(rng);
        switch (tpl.layout) {
          case Layout::Scalar:
          case Layout::Text:
            cell = number(v, tpl.decimals);
            break;
          case Layout::Range: {
            std::uniform_real_distribution<double> w(0.5 * tpl.spread, 1.5 * tpl.spread);
            cell = number(v, tpl.decimals) + "-" + number(v + w(rng), tpl.decimals);
            break;
          }
          case Layout::Gaussian: {
            std::uniform_real_distribution<double> sd(0.5 * tpl.spread, 1.5 * tpl.spread);
            cell = number(v, tpl.decimals) + " ± " + fixed(sd(rng), tpl.decimals);
            break;
          }
        }
        if (!cell_unit.empty()) cell += " " + cell_unit;
        row.push_back(std::move(cell));
      }
      const std::string id = column_id(table.name, j);
      by_template[cols[j]].push_back(id);
      corpus.column_templates[id] = tpl.name;
    }
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
      rows_by_family[family].push_back(tuple_id(table.name, i));
    }
    corpus.tables.push_back(std::move(table));
  }
  auto relate = [](const std::vector<std::string>& group, GroundTruth& truth) {
    for (const auto& q : group) {
      auto& rel = truth[q];
      for (const auto& other : group) {
        if (other != q) rel.insert(other);
      }
    }
  };
  for (const auto& [tpl, ids] : by_template) relate(ids, corpus.columns);
  // Rows are relevant to rows of other tables in the same family.
  for (const auto& [family, ids] : rows_by_family) {
    for (const auto& q : ids) {
      const std::string table = q.substr(0, q.rfind('.'));
      auto& rel = corpus.tuples[q];
      for (const auto& other : ids) {
        if (other.substr(0, other.rfind('.')) != table) rel.insert(other);
      }
    }
  }
  // Drop queries with nothing relevant (a template used once).
  std::erase_if(corpus.columns, [](const auto& kv) { return kv.second.empty(); });
  std::erase_if(corpus.tuples, [](const auto& kv) { return kv.second.empty(); });
  return corpus;
}

void write_corpus(const GeneratedCorpus& corpus, const std::string& dir) {
  namespace fs = std::filesystem;
  const fs::path root(dir);
  fs::create_directories(root / "tables");
  for (const auto& table : corpus.tables) {
    std::ofstream out(root / "tables" / (table.name + ".csv"), std::ios::binary);
    if (!out) fail(ErrorCode::Io, "cannot write table " + table.name);
    write_csv(out, table);
  }
  std::ofstream cols(root / "truth_columns.jsonl", std::ios::binary);
  std::ofstream rows(root / "truth_tuples.jsonl", std::ios::binary);
  if (!cols || !rows) fail(ErrorCode::Io, "cannot write ground truth under " + dir);
  write_ground_truth(cols, corpus.columns);
  write_ground_truth(rows, corpus.tuples);
}

}  // namespace numcomp
