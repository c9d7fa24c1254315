/** Wire protocol and scene types shared across the client. */

export interface CommandRequest {
  id: number;
  cmd: string;
  args?: Record<string, unknown>;
}

export interface CommandError {
  code: string;
  message: string;
}

export interface CommandResponse {
  id: number | null;
  ok: boolean;
  result?: Record<string, unknown>;
  error?: CommandError;
}

export interface EventMessage {
  event: string;
  payload: Record<string, unknown>;
}

export type ProtocolMessage = CommandResponse | EventMessage;

export interface SlotRefJson {
  atom: number;
  slot: number;
}

export interface SnapCandidateJson {
  held: SlotRefJson;
  target: SlotRefJson;
  distance: number;
}

export interface AtomListing {
  id: number;
  element: string;
  x: number;
  y: number;
  z: number;
  color: [number, number, number];
  radius: number;
  free_slots: number;
}

export interface BondListing {
  id: number;
  a: number;
  b: number;
  rest: number;
}

export interface AngleListing {
  a: number;
  b: number;
  degrees: number;
}

export interface WorkspaceListing {
  atoms: AtomListing[];
  bonds: BondListing[];
  anchor: number | null;
  anchor_angles: AngleListing[];
  grab: { held: number; mode: string } | null;
}

export interface Vec3 {
  x: number;
  y: number;
  z: number;
}
