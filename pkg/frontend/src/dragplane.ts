/**
 * Pointer-to-3D mapping for dragging: intersect the pointer ray with
 * the plane through the grabbed atom perpendicular to the view axis.
 * The standard 2D-to-3D drag mapping: depth stays fixed while the atom
 * follows the pointer.
 */

import type { Ray } from "./pick.js";
import { normalize } from "./pick.js";
import type { Vec3 } from "./types.js";

/**
 * Point where the ray crosses the view-perpendicular plane through
 * planePoint; null when the ray runs parallel to the plane.
 */
export function dragPlanePoint(ray: Ray, planePoint: Vec3, viewDirection: Vec3): Vec3 | null {
  const normal = normalize(viewDirection);
  const direction = normalize(ray.direction);
  const denominator =
    direction.x * normal.x + direction.y * normal.y + direction.z * normal.z;
  if (Math.abs(denominator) < 1e-12) {
    return null;
  }
  const numerator =
    (planePoint.x - ray.origin.x) * normal.x +
    (planePoint.y - ray.origin.y) * normal.y +
    (planePoint.z - ray.origin.z) * normal.z;
  const t = numerator / denominator;
  return {
    x: ray.origin.x + t * direction.x,
    y: ray.origin.y + t * direction.y,
    z: ray.origin.z + t * direction.z,
  };
}
