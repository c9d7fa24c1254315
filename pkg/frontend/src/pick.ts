/** Analytic ray-sphere picking; no renderer involvement. */

import type { Vec3 } from "./types.js";

export interface PickSphere {
  id: number;
  center: Vec3;
  radius: number;
}

export interface Ray {
  origin: Vec3;
  direction: Vec3; // need not be normalized
}

function sub(a: Vec3, b: Vec3): Vec3 {
  return { x: a.x - b.x, y: a.y - b.y, z: a.z - b.z };
}

function dot(a: Vec3, b: Vec3): number {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}

export function normalize(v: Vec3): Vec3 {
  const length = Math.sqrt(dot(v, v));
  return { x: v.x / length, y: v.y / length, z: v.z / length };
}

/**
 * Distance along the ray to the sphere surface, or null when the ray
 * misses (intersections behind the origin do not count).
 */
export function raySphereDistance(ray: Ray, center: Vec3, radius: number): number | null {
  const direction = normalize(ray.direction);
  const toCenter = sub(center, ray.origin);
  const along = dot(toCenter, direction);
  const offAxisSq = dot(toCenter, toCenter) - along * along;
  const radiusSq = radius * radius;
  if (offAxisSq > radiusSq) {
    return null;
  }
  const half = Math.sqrt(radiusSq - offAxisSq);
  const near = along - half;
  const far = along + half;
  if (near >= 0) {
    return near;
  }
  if (far >= 0) {
    return far; // origin inside the sphere
  }
  return null;
}

/** Nearest sphere hit by the ray, or null. */
export function pick(ray: Ray, spheres: readonly PickSphere[]): number | null {
  let bestId: number | null = null;
  let bestDistance = Infinity;
  for (const sphere of spheres) {
    const distance = raySphereDistance(ray, sphere.center, sphere.radius);
    if (distance !== null && distance < bestDistance) {
      bestDistance = distance;
      bestId = sphere.id;
    }
  }
  return bestId;
}
