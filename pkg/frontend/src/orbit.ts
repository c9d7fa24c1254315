/** Minimal orbit camera: yaw/pitch/distance around a target point. */

import type { Vec3 } from "./types.js";

export interface OrbitState {
  target: Vec3;
  yaw: number; // radians around +y
  pitch: number; // radians above the horizon
  distance: number;
}

const PITCH_LIMIT = Math.PI / 2 - 0.01;

export function defaultOrbit(): OrbitState {
  return { target: { x: 0, y: 0, z: 0 }, yaw: 0.6, pitch: 0.35, distance: 14 };
}

export function orbitBy(state: OrbitState, deltaYaw: number, deltaPitch: number): OrbitState {
  return {
    ...state,
    yaw: state.yaw + deltaYaw,
    pitch: Math.max(-PITCH_LIMIT, Math.min(PITCH_LIMIT, state.pitch + deltaPitch)),
  };
}

export function zoomBy(state: OrbitState, factor: number): OrbitState {
  return { ...state, distance: Math.min(200, Math.max(1, state.distance * factor)) };
}

export function panBy(state: OrbitState, right: number, up: number): OrbitState {
  const { x: rx, z: rz } = { x: Math.cos(state.yaw), z: -Math.sin(state.yaw) };
  return {
    ...state,
    target: {
      x: state.target.x + rx * right,
      y: state.target.y + up,
      z: state.target.z + rz * right,
    },
  };
}

export function cameraPosition(state: OrbitState): Vec3 {
  const horizontal = state.distance * Math.cos(state.pitch);
  return {
    x: state.target.x + horizontal * Math.sin(state.yaw),
    y: state.target.y + state.distance * Math.sin(state.pitch),
    z: state.target.z + horizontal * Math.cos(state.yaw),
  };
}

export function viewDirection(state: OrbitState): Vec3 {
  const position = cameraPosition(state);
  return {
    x: state.target.x - position.x,
    y: state.target.y - position.y,
    z: state.target.z - position.z,
  };
}
