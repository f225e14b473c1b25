#include "wban/pdr.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace wban {

PdrModel load_pdr_model(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open rate table: " + path);
  PdrModel m;
  m.rates.clear();
  m.alpha.clear();
  m.beta.clear();
  std::string line;
  long long line_no = 0;
  while (std::getline(f, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    double rate, a, b;
    char c1, c2;
    if (!(ss >> rate >> c1 >> a >> c2 >> b) || c1 != ',' || c2 != ',')
      throw std::runtime_error("rate table parse error at line " +
                               std::to_string(line_no) + ": " + line);
    if (rate <= 0.0)
      throw std::runtime_error("non-positive rate at line " +
                               std::to_string(line_no));
    m.rates.push_back(rate);
    m.alpha.push_back(a);
    m.beta.push_back(b);
  }
  if (m.rates.empty())
    throw std::runtime_error("rate table is empty: " + path);
  return m;
}

} // namespace wban
