#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "lips/geometry.hpp"

namespace lips {

/// @brief Joint frame offset: translation plus fixed-axis roll-pitch-yaw.
struct UrdfOrigin {
  Eigen::Vector3d xyz = Eigen::Vector3d::Zero();
  Eigen::Vector3d rpy = Eigen::Vector3d::Zero();
};

/// @brief Travel limits of a revolute joint.
struct UrdfLimit {
  double lower = 0.0;
  double upper = 0.0;
};

/// @brief Rigid body named in the robot description.
struct UrdfLink {
  std::string name;
};

/// @brief Connection between two links; only revolute and fixed types are
/// accepted.
struct UrdfJoint {
  std::string name;
  std::string type;
  std::string parent;
  std::string child;
  UrdfOrigin origin;
  Eigen::Vector3d axis = {1.0, 0.0, 0.0};
  std::optional<UrdfLimit> limit;
};

/// @brief Marks a serial pitch/roll joint pair as driven by one parallel
/// ankle with the attached geometry.
struct AnkleBinding {
  std::string pitch_joint;
  std::string roll_joint;
  AnkleGeometry geometry;
};

/// @brief Serial-side robot description plus any ankle bindings.
struct RobotModel {
  std::string name;
  std::vector<UrdfLink> links;
  std::vector<UrdfJoint> joints;
  std::vector<AnkleBinding> ankle_bindings;
};

/// @brief Parses the URDF subset: robot, link, and joint elements with
/// origin, axis, limit, parent, and child children.
///
/// Unknown elements are skipped wholesale; unknown attributes on recognized
/// elements are rejected. Throws SyntaxError for malformed XML, SchemaError
/// for structural violations, and LoopError when the joint graph is not a
/// single tree.
RobotModel parse_urdf_subset(const std::string& text);

/// @brief Emits the model in canonical form; parsing the output yields a
/// structurally identical model.
std::string serialize_urdf(const RobotModel& model);

/// @brief Returns a copy of the model with an ankle binding added.
///
/// Both joints must exist, be revolute, and have axes matching (0,1,0) for
/// pitch and (1,0,0) for roll within 1e-6; otherwise throws BindError.
RobotModel bind_ankle(const RobotModel& model, const std::string& pitch_joint,
                      const std::string& roll_joint,
                      const AnkleGeometry& geom);

}  // namespace lips
