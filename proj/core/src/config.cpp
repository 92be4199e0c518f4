// SPDX-License-Identifier: Apache-2.0

#include <cctype>
#include <fstream>
#include <sstream>

#include "dtn/experiment.hpp"
#include "dtn/hash.hpp"

namespace dtn
{

namespace
{

std::string Trim(const std::string &s)
{
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace((unsigned char)s[a]))
  {
    a++;
  }
  while (b > a && std::isspace((unsigned char)s[b - 1]))
  {
    b--;
  }
  return s.substr(a, b - a);
}

std::vector<std::string> SplitList(const std::string &s)
{
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s)
  {
    if (ch == ',')
    {
      out.push_back(Trim(cur));
      cur.clear();
    }
    else
    {
      cur += ch;
    }
  }
  out.push_back(Trim(cur));
  return out;
}

double ParseDouble(const std::string &field, const std::string &value)
{
  try
  {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size())
    {
      throw std::invalid_argument(value);
    }
    return v;
  }
  catch (const std::exception &)
  {
    throw ConfigError("config field '" + field + "': malformed number '" + value + "'");
  }
}

long ParseInt(const std::string &field, const std::string &value)
{
  try
  {
    std::size_t used = 0;
    const long v = std::stol(value, &used);
    if (used != value.size())
    {
      throw std::invalid_argument(value);
    }
    return v;
  }
  catch (const std::exception &)
  {
    throw ConfigError("config field '" + field + "': malformed integer '" + value + "'");
  }
}

void CheckExpression(const std::string &field, const std::string &text)
{
  try
  {
    FieldExpr::Parse(text);
  }
  catch (const FieldParseError &e)
  {
    throw ConfigError("config field '" + field + "': " + e.what());
  }
}

}  // namespace

Mesh ExperimentConfig::BuildMesh() const
{
  if (mesh_path)
  {
    return LoadMeshFile(*mesh_path);
  }
  ShapeParams params;
  params.inner_radius = inner_radius;
  params.cap_angle = cap_angle;
  if (kind == "disk")
  {
    return BuiltinMesh(BuiltinKind::Disk, refine, params);
  }
  if (kind == "annulus")
  {
    return BuiltinMesh(BuiltinKind::Annulus, refine, params);
  }
  if (kind == "spherical-cap")
  {
    return BuiltinMesh(BuiltinKind::SphericalCap, refine, params);
  }
  throw ConfigError("config field 'geometry.kind': unknown geometry '" + kind + "'");
}

CoefficientSet ExperimentConfig::BuildCoefficients() const
{
  CoefficientSet cs;
  const auto a_parts = SplitList(a_text);
  if (a_parts.size() != 4)
  {
    throw ConfigError("config field 'coefficients.a': expected 4 comma-separated "
                      "expressions (a11, a12, a21, a22)");
  }
  for (int i = 0; i < 4; i++)
  {
    CheckExpression("coefficients.a", a_parts[i]);
    cs.a[i] = FieldExpr::Parse(a_parts[i]);
  }
  const auto b_parts = SplitList(b_text);
  if (b_parts.size() != 2)
  {
    throw ConfigError("config field 'coefficients.b': expected 2 comma-separated "
                      "expressions");
  }
  for (int i = 0; i < 2; i++)
  {
    CheckExpression("coefficients.b", b_parts[i]);
    cs.b[i] = FieldExpr::Parse(b_parts[i]);
  }
  cs.b_support_inner = b_support_inner;
  cs.b_support_outer = b_support_outer;
  if (!(cs.b_support_inner > 0.0 && cs.b_support_outer > cs.b_support_inner))
  {
    throw ConfigError("config field 'coefficients.b_support': need 0 < inner < outer");
  }
  CheckExpression("coefficients.c", c_text);
  CheckExpression("coefficients.d", d_text);
  CheckExpression("coefficients.beta", beta_text);
  cs.c = FieldExpr::Parse(c_text);
  cs.d = FieldExpr::Parse(d_text);
  cs.beta = FieldExpr::Parse(beta_text);
  try
  {
    cs.lambda = ParseComplex(lambda_text);
  }
  catch (const FieldParseError &e)
  {
    throw ConfigError(std::string("config field 'coefficients.lambda': ") + e.what());
  }
  return cs;
}

std::string ExperimentConfig::Canonical() const
{
  std::ostringstream os;
  os << "[geometry]\n";
  if (mesh_path)
  {
    os << "mesh = " << *mesh_path << "\n";
  }
  else
  {
    os << "kind = " << kind << "\nrefine = " << refine << "\n";
    if (kind == "annulus")
    {
      os << "inner = " << inner_radius << "\n";
    }
    if (kind == "spherical-cap")
    {
      os << "angle = " << cap_angle << "\n";
    }
  }
  os << "[coefficients]\n"
     << "a = " << a_text << "\nb = " << b_text << "\nb_support = " << b_support_inner
     << ", " << b_support_outer << "\nc = " << c_text << "\nd = " << d_text
     << "\nbeta = " << beta_text << "\nlambda = " << lambda_text << "\n[experiments]\nrun = ";
  for (std::size_t i = 0; i < experiments.size(); i++)
  {
    os << (i ? ", " : "") << experiments[i];
  }
  os << "\n[sector]\nangles = ";
  for (std::size_t i = 0; i < sector_angles.size(); i++)
  {
    os << (i ? "," : "") << sector_angles[i];
  }
  os << "\n[output]\nseed = " << seed << "\n";
  for (const auto &[k, v] : tolerances)
  {
    os << "[tolerances] " << k << " = " << v << "\n";
  }
  return os.str();
}

std::uint64_t ExperimentConfig::Hash() const
{
  return Fnv1a64(Canonical());
}

ExperimentConfig ParseConfig(std::istream &in)
{
  ExperimentConfig cfg;
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line))
  {
    lineno++;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos)
    {
      line = line.substr(0, hash);
    }
    line = Trim(line);
    if (line.empty())
    {
      continue;
    }
    if (line.front() == '[' && line.back() == ']')
    {
      section = Trim(line.substr(1, line.size() - 2));
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
    {
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected 'key = value'");
    }
    const std::string key = Trim(line.substr(0, eq));
    const std::string value = Trim(line.substr(eq + 1));
    const std::string field = section + "." + key;

    if (section == "geometry")
    {
      if (key == "kind")
      {
        cfg.kind = value;
      }
      else if (key == "mesh")
      {
        cfg.mesh_path = value;
      }
      else if (key == "refine")
      {
        cfg.refine = static_cast<int>(ParseInt(field, value));
      }
      else if (key == "inner")
      {
        cfg.inner_radius = ParseDouble(field, value);
      }
      else if (key == "angle")
      {
        cfg.cap_angle = ParseDouble(field, value);
      }
      else
      {
        throw ConfigError("config field '" + field + "': unknown key");
      }
    }
    else if (section == "coefficients")
    {
      if (key == "a")
      {
        cfg.a_text = value;
      }
      else if (key == "b")
      {
        cfg.b_text = value;
      }
      else if (key == "b_support")
      {
        const auto parts = SplitList(value);
        if (parts.size() != 2)
        {
          throw ConfigError("config field '" + field + "': expected 'inner, outer'");
        }
        cfg.b_support_inner = ParseDouble(field, parts[0]);
        cfg.b_support_outer = ParseDouble(field, parts[1]);
      }
      else if (key == "c")
      {
        cfg.c_text = value;
      }
      else if (key == "d")
      {
        cfg.d_text = value;
      }
      else if (key == "beta")
      {
        cfg.beta_text = value;
      }
      else if (key == "lambda")
      {
        cfg.lambda_text = value;
      }
      else
      {
        throw ConfigError("config field '" + field + "': unknown key");
      }
    }
    else if (section == "experiments")
    {
      if (key == "run")
      {
        cfg.experiments = SplitList(value);
        if (cfg.experiments.size() == 1 && cfg.experiments[0].empty())
        {
          cfg.experiments.clear();
        }
      }
      else
      {
        throw ConfigError("config field '" + field + "': unknown key");
      }
    }
    else if (section == "sector")
    {
      if (key == "angles")
      {
        cfg.sector_angles.clear();
        for (const auto &part : SplitList(value))
        {
          cfg.sector_angles.push_back(ParseDouble(field, part));
        }
      }
      else
      {
        throw ConfigError("config field '" + field + "': unknown key");
      }
    }
    else if (section == "output")
    {
      if (key == "directory")
      {
        cfg.out_dir = value;
      }
      else if (key == "seed")
      {
        cfg.seed = static_cast<std::uint64_t>(ParseInt(field, value));
      }
      else
      {
        throw ConfigError("config field '" + field + "': unknown key");
      }
    }
    else if (section == "tolerances")
    {
      const double tol = ParseDouble(field, value);
      if (!(tol > 0.0))
      {
        throw ConfigError("config field '" + field + "': tolerance must be positive");
      }
      cfg.tolerances[key] = tol;
    }
    else
    {
      throw ConfigError("config line " + std::to_string(lineno) + ": unknown section '" +
                        section + "'");
    }
  }

  // fail early on malformed expressions, naming the field
  cfg.BuildCoefficients();
  const std::set<std::string> known = {"dtn-spectrum",    "sector",
                                       "compare-sqrt",    "robin-sweep",
                                       "wentzell-evolve", "full-acceptance"};
  for (const auto &e : cfg.experiments)
  {
    if (!known.count(e))
    {
      throw ConfigError("config field 'experiments.run': unknown experiment '" + e + "'");
    }
  }
  return cfg;
}

ExperimentConfig ParseConfigFile(const std::string &path)
{
  std::ifstream in(path);
  if (!in)
  {
    throw ConfigError("cannot open config file '" + path + "'");
  }
  return ParseConfig(in);
}

}  // namespace dtn
