/**
 * Scene state and render model.
 *
 * The engine owns all molecular state: the scene is a pure function of
 * the latest workspace listing plus the transient flash driven by
 * snap events. Rebuilding from a fresh listing must always equal the
 * incrementally maintained state, which the tests assert.
 */

import type { EventMessage, SnapCandidateJson, WorkspaceListing } from "./types.js";

export interface SceneState {
  listing: WorkspaceListing;
  /** Atom lit green because the engine reports it as the snap target. */
  flashing: number | null;
}

export interface SphereNode {
  kind: "sphere";
  id: number;
  element: string;
  position: [number, number, number];
  radius: number;
  color: [number, number, number];
  flashing: boolean;
  anchored: boolean;
}

export interface StickNode {
  kind: "stick";
  id: number;
  from: [number, number, number];
  to: [number, number, number];
}

export interface AngleLabelNode {
  kind: "label";
  text: string;
  anchorAtom: number;
}

export type RenderNode = SphereNode | StickNode | AngleLabelNode;

export function emptyListing(): WorkspaceListing {
  return { atoms: [], bonds: [], anchor: null, anchor_angles: [], grab: null };
}

export function initialState(listing?: WorkspaceListing): SceneState {
  return { listing: listing ?? emptyListing(), flashing: null };
}

/** Fold one engine event into the state; listings arrive separately. */
export function applyEvent(state: SceneState, event: EventMessage): SceneState {
  switch (event.event) {
    case "snap_candidate": {
      const candidate = event.payload as unknown as SnapCandidateJson;
      return { ...state, flashing: candidate.target.atom };
    }
    case "snap_cleared":
      return { ...state, flashing: null };
    case "anchor_changed": {
      const atom = (event.payload as { atom: number | null }).atom;
      const listing = { ...state.listing, anchor: atom };
      if (atom === null) {
        listing.anchor_angles = [];
      }
      return { ...state, listing };
    }
    default:
      return state; // relax_done etc. only signal that a refetch is due
  }
}

/** Replace the authoritative listing after a refetch. */
export function applyListing(state: SceneState, listing: WorkspaceListing): SceneState {
  const flashing =
    state.flashing !== null && listing.atoms.some((a) => a.id === state.flashing)
      ? state.flashing
      : null;
  return { listing, flashing };
}

/** Deterministic draw list: spheres, sticks, then anchor angle labels. */
export function renderModel(state: SceneState): RenderNode[] {
  const nodes: RenderNode[] = [];
  const byId = new Map(state.listing.atoms.map((a) => [a.id, a]));
  for (const atom of [...state.listing.atoms].sort((a, b) => a.id - b.id)) {
    nodes.push({
      kind: "sphere",
      id: atom.id,
      element: atom.element,
      position: [atom.x, atom.y, atom.z],
      radius: atom.radius,
      color: atom.color,
      flashing: state.flashing === atom.id,
      anchored: state.listing.anchor === atom.id,
    });
  }
  for (const bond of [...state.listing.bonds].sort((a, b) => a.id - b.id)) {
    const from = byId.get(bond.a);
    const to = byId.get(bond.b);
    if (!from || !to) {
      continue;
    }
    nodes.push({
      kind: "stick",
      id: bond.id,
      from: [from.x, from.y, from.z],
      to: [to.x, to.y, to.z],
    });
  }
  if (state.listing.anchor !== null) {
    for (const angle of state.listing.anchor_angles) {
      nodes.push({
        kind: "label",
        text: `${angle.a}-${angle.b}: ${angle.degrees.toFixed(1)}°`,
        anchorAtom: state.listing.anchor,
      });
    }
  }
  return nodes;
}

export function sameRender(a: RenderNode[], b: RenderNode[]): boolean {
  return JSON.stringify(a) === JSON.stringify(b);
}
