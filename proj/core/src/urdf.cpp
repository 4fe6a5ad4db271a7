#include "lips/urdf.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <queue>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "lips/errors.hpp"

namespace lips {

namespace {

struct XmlAttribute {
  std::string name;
  std::string value;
};

struct XmlElement {
  std::string name;
  std::vector<XmlAttribute> attributes;
  std::vector<XmlElement> children;
};

/// Recursive-descent reader for the URDF subset: elements, attributes,
/// comments, processing instructions, and the five predefined entities.
/// No namespaces, no DTD, no CDATA.
class XmlReader {
 public:
  explicit XmlReader(const std::string& text) : text_(text) {}

  XmlElement parse_document() {
    skip_misc();
    if (pos_ >= text_.size() || text_[pos_] != '<') {
      fail("expected a root element");
    }
    XmlElement root = parse_element();
    skip_misc();
    if (pos_ != text_.size()) {
      fail("trailing content after the root element");
    }
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    std::ostringstream msg;
    msg << "malformed XML at offset " << pos_ << ": " << why;
    throw SyntaxError(msg.str());
  }

  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
  }

  bool starts_with(const char* prefix) const {
    return text_.compare(pos_, std::char_traits<char>::length(prefix),
                         prefix) == 0;
  }

  void expect(char c) {
    if (peek() != c) {
      fail(std::string("expected '") + c + "'");
    }
    ++pos_;
  }

  void skip_whitespace() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }

  void skip_until(const char* terminator, const char* what) {
    const std::size_t found = text_.find(terminator, pos_);
    if (found == std::string::npos) {
      fail(std::string("unterminated ") + what);
    }
    pos_ = found + std::char_traits<char>::length(terminator);
  }

  void skip_misc() {
    for (;;) {
      skip_whitespace();
      if (starts_with("<?")) {
        pos_ += 2;
        skip_until("?>", "processing instruction");
      } else if (starts_with("<!--")) {
        pos_ += 4;
        skip_until("-->", "comment");
      } else if (starts_with("<!")) {
        fail("markup declarations are not supported");
      } else {
        return;
      }
    }
  }

  static bool is_name_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
  }

  static bool is_name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
           c == '-' || c == '.';
  }

  std::string read_name() {
    if (!is_name_start(peek())) {
      fail("expected a name");
    }
    const std::size_t start = pos_;
    while (is_name_char(peek())) {
      ++pos_;
    }
    return text_.substr(start, pos_ - start);
  }

  std::string read_entity() {
    expect('&');
    const std::size_t semi = text_.find(';', pos_);
    if (semi == std::string::npos || semi - pos_ > 4) {
      fail("unterminated entity reference");
    }
    const std::string name = text_.substr(pos_, semi - pos_);
    pos_ = semi + 1;
    if (name == "lt") return "<";
    if (name == "gt") return ">";
    if (name == "amp") return "&";
    if (name == "apos") return "'";
    if (name == "quot") return "\"";
    fail("unknown entity '&" + name + ";'");
  }

  std::string read_attribute_value() {
    const char quote = peek();
    if (quote != '"' && quote != '\'') {
      fail("attribute value must be quoted");
    }
    ++pos_;
    std::string value;
    for (;;) {
      const char c = peek();
      if (c == '\0') {
        fail("unterminated attribute value");
      }
      if (c == quote) {
        ++pos_;
        return value;
      }
      if (c == '<') {
        fail("'<' is not allowed inside an attribute value");
      }
      if (c == '&') {
        value += read_entity();
      } else {
        value += c;
        ++pos_;
      }
    }
  }

  XmlElement parse_element() {
    expect('<');
    XmlElement elem;
    elem.name = read_name();

    for (;;) {
      skip_whitespace();
      if (peek() == '/') {
        ++pos_;
        expect('>');
        return elem;
      }
      if (peek() == '>') {
        ++pos_;
        break;
      }
      XmlAttribute attr;
      attr.name = read_name();
      for (const XmlAttribute& seen : elem.attributes) {
        if (seen.name == attr.name) {
          fail("duplicate attribute '" + attr.name + "'");
        }
      }
      skip_whitespace();
      expect('=');
      skip_whitespace();
      attr.value = read_attribute_value();
      elem.attributes.push_back(std::move(attr));
    }

    for (;;) {
      while (peek() != '<') {
        if (peek() == '\0') {
          fail("unterminated element <" + elem.name + ">");
        }
        ++pos_;
      }
      if (starts_with("</")) {
        pos_ += 2;
        const std::string closing = read_name();
        if (closing != elem.name) {
          fail("closing tag </" + closing + "> does not match <" + elem.name +
               ">");
        }
        skip_whitespace();
        expect('>');
        return elem;
      }
      if (starts_with("<!--")) {
        pos_ += 4;
        skip_until("-->", "comment");
      } else if (starts_with("<?")) {
        pos_ += 2;
        skip_until("?>", "processing instruction");
      } else if (starts_with("<!")) {
        fail("markup declarations are not supported");
      } else {
        elem.children.push_back(parse_element());
      }
    }
  }

  const std::string& text_;
  std::size_t pos_ = 0;
};

const std::string* find_attribute(const XmlElement& elem, const char* name) {
  for (const XmlAttribute& attr : elem.attributes) {
    if (attr.name == name) {
      return &attr.value;
    }
  }
  return nullptr;
}

void reject_unknown_attributes(const XmlElement& elem,
                               std::initializer_list<const char*> known) {
  for (const XmlAttribute& attr : elem.attributes) {
    bool ok = false;
    for (const char* k : known) {
      if (attr.name == k) {
        ok = true;
        break;
      }
    }
    if (!ok) {
      throw SchemaError("unknown attribute '" + attr.name + "' on <" +
                        elem.name + ">");
    }
  }
}

const std::string& require_attribute(const XmlElement& elem,
                                     const char* name) {
  const std::string* value = find_attribute(elem, name);
  if (value == nullptr) {
    throw SchemaError("<" + elem.name + "> is missing required attribute '" +
                      name + "'");
  }
  return *value;
}

double parse_number(const std::string& text, const XmlElement& elem,
                    const char* attribute) {
  const char* begin = text.c_str();
  char* end = nullptr;
  const double value = std::strtod(begin, &end);
  while (end != nullptr && *end != '\0' &&
         std::isspace(static_cast<unsigned char>(*end))) {
    ++end;
  }
  if (end == begin || end == nullptr || *end != '\0') {
    throw SchemaError("attribute '" + std::string(attribute) + "' of <" +
                      elem.name + "> is not a number: \"" + text + "\"");
  }
  return value;
}

Eigen::Vector3d parse_vec3(const std::string& text, const XmlElement& elem,
                           const char* attribute) {
  std::istringstream in(text);
  Eigen::Vector3d v;
  if (!(in >> v.x() >> v.y() >> v.z())) {
    throw SchemaError("attribute '" + std::string(attribute) + "' of <" +
                      elem.name + "> must hold three numbers: \"" + text +
                      "\"");
  }
  std::string rest;
  if (in >> rest) {
    throw SchemaError("attribute '" + std::string(attribute) + "' of <" +
                      elem.name + "> must hold three numbers: \"" + text +
                      "\"");
  }
  return v;
}

UrdfJoint parse_joint(const XmlElement& elem) {
  reject_unknown_attributes(elem, {"name", "type"});
  UrdfJoint joint;
  joint.name = require_attribute(elem, "name");
  joint.type = require_attribute(elem, "type");
  if (joint.type != "revolute" && joint.type != "fixed") {
    throw SchemaError("joint '" + joint.name + "' has unsupported type '" +
                      joint.type + "' (expected revolute or fixed)");
  }

  bool have_parent = false;
  bool have_child = false;
  bool have_origin = false;
  bool have_axis = false;
  for (const XmlElement& child : elem.children) {
    if (child.name == "origin") {
      if (have_origin) {
        throw SchemaError("joint '" + joint.name +
                          "' has more than one <origin>");
      }
      have_origin = true;
      reject_unknown_attributes(child, {"xyz", "rpy"});
      if (const std::string* xyz = find_attribute(child, "xyz")) {
        joint.origin.xyz = parse_vec3(*xyz, child, "xyz");
      }
      if (const std::string* rpy = find_attribute(child, "rpy")) {
        joint.origin.rpy = parse_vec3(*rpy, child, "rpy");
      }
    } else if (child.name == "axis") {
      if (have_axis) {
        throw SchemaError("joint '" + joint.name +
                          "' has more than one <axis>");
      }
      have_axis = true;
      reject_unknown_attributes(child, {"xyz"});
      joint.axis = parse_vec3(require_attribute(child, "xyz"), child, "xyz");
    } else if (child.name == "limit") {
      if (joint.limit) {
        throw SchemaError("joint '" + joint.name +
                          "' has more than one <limit>");
      }
      reject_unknown_attributes(child, {"lower", "upper"});
      UrdfLimit limit;
      limit.lower =
          parse_number(require_attribute(child, "lower"), child, "lower");
      limit.upper =
          parse_number(require_attribute(child, "upper"), child, "upper");
      joint.limit = limit;
    } else if (child.name == "parent") {
      if (have_parent) {
        throw SchemaError("joint '" + joint.name +
                          "' has more than one <parent>");
      }
      have_parent = true;
      reject_unknown_attributes(child, {"link"});
      joint.parent = require_attribute(child, "link");
    } else if (child.name == "child") {
      if (have_child) {
        throw SchemaError("joint '" + joint.name +
                          "' has more than one <child>");
      }
      have_child = true;
      reject_unknown_attributes(child, {"link"});
      joint.child = require_attribute(child, "link");
    }
  }
  if (!have_parent || !have_child) {
    throw SchemaError("joint '" + joint.name +
                      "' needs both <parent> and <child> elements");
  }
  return joint;
}

void check_joint_graph(const RobotModel& model) {
  std::unordered_set<std::string> link_names;
  for (const UrdfLink& link : model.links) {
    if (!link_names.insert(link.name).second) {
      throw SchemaError("duplicate link name '" + link.name + "'");
    }
  }

  std::unordered_set<std::string> joint_names;
  std::unordered_map<std::string, std::vector<std::string>> children_of;
  std::unordered_set<std::string> used_as_child;
  for (const UrdfJoint& joint : model.joints) {
    if (!joint_names.insert(joint.name).second) {
      throw SchemaError("duplicate joint name '" + joint.name + "'");
    }
    for (const std::string* link : {&joint.parent, &joint.child}) {
      if (link_names.find(*link) == link_names.end()) {
        throw SchemaError("joint '" + joint.name +
                          "' references undeclared link '" + *link + "'");
      }
    }
    if (!used_as_child.insert(joint.child).second) {
      throw LoopError("joint '" + joint.name + "' closes a loop: link '" +
                      joint.child + "' already has a parent");
    }
    children_of[joint.parent].push_back(joint.child);
  }

  if (model.joints.empty()) {
    return;
  }

  std::string root;
  for (const UrdfLink& link : model.links) {
    if (used_as_child.find(link.name) != used_as_child.end()) {
      continue;
    }
    if (!root.empty()) {
      throw LoopError("joint graph is not a single tree: both '" + root +
                      "' and '" + link.name + "' are roots");
    }
    root = link.name;
  }
  if (root.empty()) {
    throw LoopError("joint graph has no root: every link has a parent");
  }

  std::unordered_set<std::string> reached{root};
  std::queue<std::string> frontier;
  frontier.push(root);
  while (!frontier.empty()) {
    const std::string current = frontier.front();
    frontier.pop();
    const auto it = children_of.find(current);
    if (it == children_of.end()) {
      continue;
    }
    for (const std::string& child : it->second) {
      if (reached.insert(child).second) {
        frontier.push(child);
      }
    }
  }
  for (const UrdfLink& link : model.links) {
    if (reached.find(link.name) == reached.end()) {
      throw LoopError("link '" + link.name + "' is not reachable from root '" +
                      root + "': joint graph contains a cycle");
    }
  }
}

std::string escape_attribute(const std::string& value) {
  std::string out;
  out.reserve(value.size());
  for (const char c : value) {
    switch (c) {
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '&':
        out += "&amp;";
        break;
      case '"':
        out += "&quot;";
        break;
      case '\'':
        out += "&apos;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

std::string format_number(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

std::string format_vec3(const Eigen::Vector3d& v) {
  return format_number(v.x()) + " " + format_number(v.y()) + " " +
         format_number(v.z());
}

const UrdfJoint* find_joint(const RobotModel& model, const std::string& name) {
  for (const UrdfJoint& joint : model.joints) {
    if (joint.name == name) {
      return &joint;
    }
  }
  return nullptr;
}

const UrdfJoint& require_revolute_joint(const RobotModel& model,
                                        const std::string& name) {
  const UrdfJoint* joint = find_joint(model, name);
  if (joint == nullptr) {
    throw BindError("no joint named '" + name + "' in the model");
  }
  if (joint->type != "revolute") {
    throw BindError("joint '" + name + "' has type '" + joint->type +
                    "'; an ankle binding needs a revolute joint");
  }
  return *joint;
}

void require_axis(const UrdfJoint& joint, const Eigen::Vector3d& expected,
                  const char* role) {
  if ((joint.axis - expected).norm() > 1e-6) {
    std::ostringstream msg;
    msg << role << " joint '" << joint.name << "' has axis (" << joint.axis.x()
        << ", " << joint.axis.y() << ", " << joint.axis.z()
        << "), expected (" << expected.x() << ", " << expected.y() << ", "
        << expected.z() << ") within 1e-6";
    throw BindError(msg.str());
  }
}

}  // namespace

RobotModel parse_urdf_subset(const std::string& text) {
  XmlReader reader(text);
  const XmlElement root = reader.parse_document();
  if (root.name != "robot") {
    throw SchemaError("root element must be <robot>, got <" + root.name + ">");
  }
  reject_unknown_attributes(root, {"name"});

  RobotModel model;
  if (const std::string* name = find_attribute(root, "name")) {
    model.name = *name;
  }
  for (const XmlElement& child : root.children) {
    if (child.name == "link") {
      reject_unknown_attributes(child, {"name"});
      model.links.push_back(UrdfLink{require_attribute(child, "name")});
    } else if (child.name == "joint") {
      model.joints.push_back(parse_joint(child));
    }
  }

  check_joint_graph(model);
  return model;
}

std::string serialize_urdf(const RobotModel& model) {
  std::ostringstream out;
  out << "<?xml version=\"1.0\"?>\n";
  out << "<robot name=\"" << escape_attribute(model.name) << "\">\n";
  for (const UrdfLink& link : model.links) {
    out << "  <link name=\"" << escape_attribute(link.name) << "\"/>\n";
  }
  for (const UrdfJoint& joint : model.joints) {
    out << "  <joint name=\"" << escape_attribute(joint.name) << "\" type=\""
        << escape_attribute(joint.type) << "\">\n";
    out << "    <origin xyz=\"" << format_vec3(joint.origin.xyz)
        << "\" rpy=\"" << format_vec3(joint.origin.rpy) << "\"/>\n";
    out << "    <axis xyz=\"" << format_vec3(joint.axis) << "\"/>\n";
    if (joint.limit) {
      out << "    <limit lower=\"" << format_number(joint.limit->lower)
          << "\" upper=\"" << format_number(joint.limit->upper) << "\"/>\n";
    }
    out << "    <parent link=\"" << escape_attribute(joint.parent) << "\"/>\n";
    out << "    <child link=\"" << escape_attribute(joint.child) << "\"/>\n";
    out << "  </joint>\n";
  }
  out << "</robot>\n";
  return out.str();
}

RobotModel bind_ankle(const RobotModel& model, const std::string& pitch_joint,
                      const std::string& roll_joint,
                      const AnkleGeometry& geom) {
  if (pitch_joint == roll_joint) {
    throw BindError("pitch and roll must be distinct joints, got '" +
                    pitch_joint + "' twice");
  }
  const UrdfJoint& pitch = require_revolute_joint(model, pitch_joint);
  const UrdfJoint& roll = require_revolute_joint(model, roll_joint);
  require_axis(pitch, {0.0, 1.0, 0.0}, "pitch");
  require_axis(roll, {1.0, 0.0, 0.0}, "roll");

  RobotModel bound = model;
  bound.ankle_bindings.push_back(AnkleBinding{pitch_joint, roll_joint, geom});
  return bound;
}

}  // namespace lips
