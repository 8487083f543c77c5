#include "balkit/iofmt.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace balkit {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

json matrix_to_json(const MatrixXd& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

MatrixXd matrix_from_json(const json& j, const std::string& field, const std::string& where) {
  if (!j.is_array()) throw SchemaError(where + ": field '" + field + "' must be an array of rows");
  const Index rows = static_cast<Index>(j.size());
  Index cols = -1;
  MatrixXd m;
  for (Index i = 0; i < rows; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array()) throw SchemaError(where + ": row " + std::to_string(i) + " of '" + field + "' is not an array");
    if (cols < 0) {
      cols = static_cast<Index>(row.size());
      m.resize(rows, cols);
    } else if (static_cast<Index>(row.size()) != cols) {
      throw SchemaError(where + ": rows of '" + field + "' differ in length");
    }
    for (Index c = 0; c < cols; ++c) {
      const json& v = row[static_cast<std::size_t>(c)];
      if (!v.is_number()) throw SchemaError(where + ": non-numeric entry in '" + field + "'");
      m(i, c) = v.get<double>();
    }
  }
  if (cols < 0) m.resize(0, 0);
  return m;
}

const json& require(const json& doc, const std::string& field, const std::string& where) {
  if (!doc.is_object() || !doc.contains(field)) throw SchemaError(where + ": missing field '" + field + "'");
  return doc.at(field);
}

MatrixMarketData read_named(const fs::path& base, const json& doc, const std::string& field, const std::string& where) {
  const json& v = require(doc, field, where);
  if (!v.is_string()) throw SchemaError(where + ": field '" + field + "' must be a file name");
  return read_matrix_market(base / v.get<std::string>());
}

}  // namespace

StateSpace load_system(const fs::path& manifest) {
  const std::string where = manifest.string();
  const json doc = read_json(manifest);
  const fs::path base = manifest.parent_path();

  auto file_of = [&](const std::string& f) { return (base / doc.at(f).get<std::string>()).string(); };

  const MatrixMarketData a = read_named(base, doc, "A", where);
  if (a.rows() != a.cols()) throw DimensionError(file_of("A") + ": A must be square");
  const Index n = a.rows();
  SystemMatrix amat = a.coordinate ? SystemMatrix(a.sparse) : SystemMatrix(a.dense);

  const MatrixXd b = read_named(base, doc, "B", where).to_dense();
  if (b.rows() != n) {
    throw DimensionError(file_of("B") + ": B has " + std::to_string(b.rows()) + " rows, expected " + std::to_string(n));
  }
  const MatrixXd c = read_named(base, doc, "C", where).to_dense();
  if (c.cols() != n) {
    throw DimensionError(file_of("C") + ": C has " + std::to_string(c.cols()) + " columns, expected " +
                         std::to_string(n));
  }

  SystemMatrix emat = SystemMatrix::identity(n);
  if (doc.contains("E") && !doc.at("E").is_null()) {
    const MatrixMarketData e = read_named(base, doc, "E", where);
    if (e.rows() != n || e.cols() != n) throw DimensionError(file_of("E") + ": E must be n x n with n = " + std::to_string(n));
    emat = e.coordinate ? SystemMatrix(e.sparse) : SystemMatrix(e.dense);
  }
  MatrixXd d = MatrixXd::Zero(c.rows(), b.cols());
  if (doc.contains("D") && !doc.at("D").is_null()) {
    d = read_named(base, doc, "D", where).to_dense();
    if (d.rows() != c.rows() || d.cols() != b.cols()) throw DimensionError(file_of("D") + ": D must be p x m");
  }
  StateSpace sys(std::move(emat), std::move(amat), b, c, std::move(d));
  if (doc.contains("stable") && doc.at("stable").is_boolean() && doc.at("stable").get<bool>()) {
    sys = sys.with_stability_asserted();
  }
  return sys;
}

void save_system(const fs::path& manifest, const StateSpace& sys) {
  const fs::path base = manifest.parent_path();
  const std::string stem = manifest.stem().string();
  json doc;
  auto put = [&](const std::string& key, auto writer) {
    const std::string file = stem + "_" + key + ".mtx";
    std::ostringstream os;
    writer(os);
    write_text(base / file, os.str());
    doc[key] = file;
  };
  auto put_system_matrix = [&](const std::string& key, const SystemMatrix& m) {
    put(key, [&](std::ostream& os) {
      if (m.is_sparse()) {
        write_matrix_market(os, m.to_sparse());
      } else {
        write_matrix_market(os, m.to_dense());
      }
    });
  };
  put_system_matrix("A", sys.A());
  put("B", [&](std::ostream& os) { write_matrix_market(os, sys.B()); });
  put("C", [&](std::ostream& os) { write_matrix_market(os, sys.C()); });
  if (!sys.E().is_identity()) put_system_matrix("E", sys.E());
  put("D", [&](std::ostream& os) { write_matrix_market(os, sys.D()); });
  if (sys.stability_asserted()) doc["stable"] = true;
  write_text(manifest, doc.dump(2) + "\n");
}

void save_rom(const fs::path& path, const ReducedModel& rom) {
  json doc;
  doc["method"] = std::string(to_string(rom.method));
  doc["r"] = rom.order;
  doc["A"] = matrix_to_json(rom.sys.A().to_dense());
  doc["B"] = matrix_to_json(rom.sys.B());
  doc["C"] = matrix_to_json(rom.sys.C());
  doc["D"] = matrix_to_json(rom.sys.D());
  if (rom.hankel_used) {
    doc["hankel_used"] = std::vector<double>(rom.hankel_used->data(), rom.hankel_used->data() + rom.hankel_used->size());
  } else {
    doc["hankel_used"] = nullptr;
  }
  if (!rom.notes.empty()) doc["notes"] = rom.notes;
  write_text(path, doc.dump(2) + "\n");
}

void save_rom(const fs::path& path, const ComplexRom& rom) {
  json doc;
  doc["method"] = std::string(to_string(rom.method));
  doc["r"] = rom.order;
  doc["A"] = matrix_to_json(rom.A.real());
  doc["B"] = matrix_to_json(rom.B.real());
  doc["C"] = matrix_to_json(rom.C.real());
  doc["D"] = matrix_to_json(rom.D.real());
  doc["A_imag"] = matrix_to_json(rom.A.imag());
  doc["B_imag"] = matrix_to_json(rom.B.imag());
  doc["C_imag"] = matrix_to_json(rom.C.imag());
  doc["D_imag"] = matrix_to_json(rom.D.imag());
  doc["hankel_used"] = std::vector<double>(rom.data_sigma.data(), rom.data_sigma.data() + rom.data_sigma.size());
  if (!rom.notes.empty()) doc["notes"] = rom.notes;
  write_text(path, doc.dump(2) + "\n");
}

namespace {

struct RomFields {
  Method method;
  int r;
  MatrixXcd a, b, c, d;
  std::optional<VectorXd> hankel;
  std::vector<std::string> notes;
};

RomFields parse_rom(const fs::path& path) {
  const std::string where = path.string();
  const json doc = read_json(path);
  RomFields f;
  const json& method = require(doc, "method", where);
  if (!method.is_string()) throw SchemaError(where + ": 'method' must be a string");
  try {
    f.method = method_from_string(method.get<std::string>());
  } catch (const UsageError& e) {
    throw SchemaError(where + ": " + e.what());
  }
  const json& r = require(doc, "r", where);
  if (!r.is_number_integer() || r.get<int>() < 1) throw SchemaError(where + ": 'r' must be a positive integer");
  f.r = r.get<int>();

  auto load = [&](const std::string& key) {
    MatrixXcd m = matrix_from_json(require(doc, key, where), key, where).cast<Complex>();
    const std::string ik = key + "_imag";
    if (doc.contains(ik)) {
      const MatrixXd im = matrix_from_json(doc.at(ik), ik, where);
      if (im.rows() != m.rows() || im.cols() != m.cols()) throw SchemaError(where + ": '" + ik + "' shape differs");
      m.imag() = im;
    }
    return m;
  };
  f.a = load("A");
  f.b = load("B");
  f.c = load("C");
  f.d = load("D");
  if (f.a.rows() != f.r || f.a.cols() != f.r) throw SchemaError(where + ": A must be r x r");
  if (f.b.rows() != f.r || f.c.cols() != f.r) throw SchemaError(where + ": B/C do not match r");
  if (f.d.rows() != f.c.rows() || f.d.cols() != f.b.cols()) throw SchemaError(where + ": D must be p x m");
  if (f.b.cols() < 1 || f.c.rows() < 1) throw SchemaError(where + ": empty input or output dimension");

  const json& h = require(doc, "hankel_used", where);
  if (!h.is_null()) {
    if (!h.is_array()) throw SchemaError(where + ": 'hankel_used' must be an array or null");
    VectorXd v(static_cast<Index>(h.size()));
    for (std::size_t i = 0; i < h.size(); ++i) {
      if (!h[i].is_number()) throw SchemaError(where + ": non-numeric entry in 'hankel_used'");
      v(static_cast<Index>(i)) = h[i].get<double>();
    }
    f.hankel = v;
  }
  if (doc.contains("notes") && doc.at("notes").is_array()) {
    for (const auto& n : doc.at("notes"))
      if (n.is_string()) f.notes.push_back(n.get<std::string>());
  }
  return f;
}

}  // namespace

ReducedModel load_rom(const fs::path& path) {
  RomFields f = parse_rom(path);
  for (const MatrixXcd* m : {&f.a, &f.b, &f.c, &f.d}) {
    if (m->imag().cwiseAbs().maxCoeff() != 0.0) {
      throw SchemaError(path.string() + ": complex ROM; load it with load_complex_rom");
    }
  }
  ReducedModel rom;
  rom.method = f.method;
  rom.order = f.r;
  rom.hankel_used = f.hankel;
  rom.notes = f.notes;
  rom.sys = StateSpace(MatrixXd(f.a.real()), MatrixXd(f.b.real()), MatrixXd(f.c.real()), MatrixXd(f.d.real()));
  return rom;
}

ComplexRom load_complex_rom(const fs::path& path) {
  RomFields f = parse_rom(path);
  ComplexRom rom;
  rom.A = std::move(f.a);
  rom.B = std::move(f.b);
  rom.C = std::move(f.c);
  rom.D = std::move(f.d);
  rom.method = f.method;
  rom.order = f.r;
  if (f.hankel) rom.data_sigma = *f.hankel;
  rom.notes = f.notes;
  rom.constant_term = rom.D;
  return rom;
}

fs::path sidecar_path(const fs::path& csv) {
  fs::path p = csv;
  p.replace_extension(".json");
  if (p == csv) p += ".json";
  return p;
}

void save_samples(const fs::path& csv, const SampleSet& samples) {
  samples.validate();
  const Index p = samples.p();
  const Index m = samples.m();
  std::ostringstream os;
  os << "omega";
  for (Index i = 0; i < p; ++i)
    for (Index j = 0; j < m; ++j) os << ",re_" << i + 1 << j + 1 << ",im_" << i + 1 << j + 1;
  os << '\n';
  for (std::size_t k = 0; k < samples.nodes.size(); ++k) {
    os << format_double(samples.nodes[k]);
    const MatrixXcd& v = samples.values[k];
    for (Index i = 0; i < p; ++i)
      for (Index j = 0; j < m; ++j) os << ',' << format_double(v(i, j).real()) << ',' << format_double(v(i, j).imag());
    os << '\n';
  }
  write_text(csv, os.str());

  json side;
  side["m"] = m;
  side["p"] = p;
  side["kind"] = std::string(to_string(samples.kind));
  side["rows"] = samples.nodes.size();
  if (samples.D) side["D"] = matrix_to_json(*samples.D);
  if (samples.H0) side["H0"] = {{"re", matrix_to_json(samples.H0->real())}, {"im", matrix_to_json(samples.H0->imag())}};
  write_text(sidecar_path(csv), side.dump(2) + "\n");
}

SampleSet load_samples(const fs::path& csv) {
  const fs::path side_path = sidecar_path(csv);
  const std::string where = side_path.string();
  const json side = read_json(side_path);
  auto positive_int = [&](const std::string& key) {
    const json& v = require(side, key, where);
    if (!v.is_number_integer() || v.get<long>() < 0) throw SchemaError(where + ": '" + key + "' must be a nonnegative integer");
    return static_cast<Index>(v.get<long>());
  };
  const Index m = positive_int("m");
  const Index p = positive_int("p");
  const Index rows = positive_int("rows");
  if (m < 1 || p < 1) throw SchemaError(where + ": m and p must be positive");
  const json& kind = require(side, "kind", where);
  if (!kind.is_string()) throw SchemaError(where + ": 'kind' must be a string");

  SampleSet out;
  out.kind = sample_kind_from_string(kind.get<std::string>());
  if (side.contains("D") && !side.at("D").is_null()) {
    out.D = matrix_from_json(side.at("D"), "D", where);
    if (out.D->rows() != p || out.D->cols() != m) throw SchemaError(where + ": D must be p x m");
  }
  if (side.contains("H0") && !side.at("H0").is_null()) {
    const json& h = side.at("H0");
    MatrixXcd h0 = matrix_from_json(require(h, "re", where), "H0.re", where).cast<Complex>();
    if (h.contains("im")) {
      const MatrixXd im = matrix_from_json(h.at("im"), "H0.im", where);
      if (im.rows() != h0.rows() || im.cols() != h0.cols()) throw SchemaError(where + ": H0.im shape differs");
      h0.imag() = im;
    }
    if (h0.rows() != p || h0.cols() != m) throw SchemaError(where + ": H0 must be p x m");
    out.H0 = h0;
  }

  std::ifstream in(csv);
  if (!in) throw IoError("cannot open '" + csv.string() + "'");
  std::string line;
  if (!std::getline(in, line)) throw ParseError(csv.string() + ": empty file");
  auto split = [](const std::string& s) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, ',')) {
      const auto b = cur.find_first_not_of(" \t\r");
      const auto e = cur.find_last_not_of(" \t\r");
      parts.push_back(b == std::string::npos ? std::string() : cur.substr(b, e - b + 1));
    }
    return parts;
  };
  const auto header = split(line);
  const std::size_t width = 1 + static_cast<std::size_t>(2 * p * m);
  if (header.size() != width || header[0] != "omega") {
    throw ParseError(csv.string() + ": header does not match p = " + std::to_string(p) + ", m = " + std::to_string(m));
  }
  std::size_t col = 1;
  for (Index i = 0; i < p; ++i) {
    for (Index j = 0; j < m; ++j) {
      const std::string suffix = std::to_string(i + 1) + std::to_string(j + 1);
      if (header[col] != "re_" + suffix || header[col + 1] != "im_" + suffix) {
        throw ParseError(csv.string() + ": header column " + std::to_string(col + 1) + " should be re_" + suffix);
      }
      col += 2;
    }
  }

  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ++row;
    const auto f = split(line);
    if (f.size() != width) {
      throw ParseError(csv.string() + ": row " + std::to_string(row) + " has " + std::to_string(f.size()) +
                       " columns, expected " + std::to_string(width));
    }
    auto num = [&](const std::string& s) {
      double v = 0.0;
      const char* first = s.data();
      if (!s.empty() && *first == '+') ++first;
      auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
      if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw ParseError(csv.string() + ": row " + std::to_string(row) + ": cannot parse '" + s + "'");
      }
      return v;
    };
    out.nodes.push_back(num(f[0]));
    MatrixXcd v(p, m);
    std::size_t c = 1;
    for (Index i = 0; i < p; ++i)
      for (Index j = 0; j < m; ++j, c += 2) v(i, j) = Complex(num(f[c]), num(f[c + 1]));
    out.values.push_back(std::move(v));
  }
  if (static_cast<Index>(row) != rows) {
    throw ParseError(csv.string() + ": sidecar announces " + std::to_string(rows) + " rows but the file has " +
                     std::to_string(row));
  }
  return out;
}

}  // namespace balkit
