#include "nanolab/io.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <system_error>
#include <unistd.h>

#include "nanolab/error.hpp"

namespace nanolab {

std::string format_double(double x) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, r.ptr);
}

std::string csv_row(const std::vector<double>& values) {
  std::string s;
  for (size_t i = 0; i < values.size(); ++i) {
    if (i) s += ',';
    s += format_double(values[i]);
  }
  return s + '\n';
}

std::string pxyz_text(const Nanotube& t) {
  std::string s = std::to_string(t.size()) + ' ' + format_double(t.period) + '\n';
  for (const auto& x : t.positions)
    s += format_double(x.x()) + ' ' + format_double(x.y()) + ' ' + format_double(x.z()) + '\n';
  return s;
}

namespace {

std::vector<std::string> fields(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  for (std::string f; in >> f;) out.push_back(f);
  return out;
}

double parse_number(const std::string& f, int line) {
  double v = 0.0;
  const auto r = std::from_chars(f.data(), f.data() + f.size(), v);
  if (r.ec != std::errc() || r.ptr != f.data() + f.size())
    throw Error(ErrorKind::ParseError, "line " + std::to_string(line) + ": not a number: '" + f + "'");
  return v;
}

}  // namespace

Nanotube parse_pxyz(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  auto next = [&]() {
    while (std::getline(in, line)) {
      ++lineno;
      if (!fields(line).empty()) return true;
    }
    return false;
  };
  if (!next()) throw Error(ErrorKind::ParseError, "line 1: empty file");
  auto head = fields(line);
  if (head.size() != 2)
    throw Error(ErrorKind::ParseError, "line " + std::to_string(lineno) + ": expected 'n L', got " +
                                           std::to_string(head.size()) + " columns");
  const double nd = parse_number(head[0], lineno);
  if (nd < 1 || nd != static_cast<int>(nd))
    throw Error(ErrorKind::ParseError, "line " + std::to_string(lineno) + ": atom count must be a positive integer");
  Nanotube t;
  t.period = parse_number(head[1], lineno);
  if (!(t.period > 0.0)) throw Error(ErrorKind::ParseError, "line " + std::to_string(lineno) + ": period must be positive");
  const int n = static_cast<int>(nd);
  t.positions.reserve(n);
  for (int a = 0; a < n; ++a) {
    if (!next())
      throw Error(ErrorKind::ParseError, "line " + std::to_string(lineno + 1) + ": expected " + std::to_string(n) +
                                             " atoms, found " + std::to_string(a));
    const auto f = fields(line);
    if (f.size() != 3)
      throw Error(ErrorKind::ParseError, "line " + std::to_string(lineno) + ": expected 3 columns, got " +
                                             std::to_string(f.size()));
    t.positions.emplace_back(parse_number(f[0], lineno), parse_number(f[1], lineno), parse_number(f[2], lineno));
  }
  if (next()) throw Error(ErrorKind::ParseError, "line " + std::to_string(lineno) + ": trailing data after " + std::to_string(n) + " atoms");
  return t;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Nanotube read_pxyz(const std::string& path) {
  try {
    return parse_pxyz(read_file(path));
  } catch (const Error& e) {
    throw Error(ErrorKind::ParseError, path + ": " + std::string(e.what()).substr(std::string("parse-error: ").size()));
  }
}

void atomic_write(const std::string& path, const std::string& content) {
  const std::filesystem::path target(path);
  std::filesystem::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::InvalidParameter, "cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw Error(ErrorKind::InvalidParameter, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw Error(ErrorKind::InvalidParameter, "cannot rename into " + path + ": " + ec.message());
  }
}

}  // namespace nanolab
