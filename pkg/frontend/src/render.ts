/**
 * three.js binding: rebuilds scene objects from the render model.
 *
 * Rebuilding wholesale keeps the view trivially consistent with the
 * model (the stateless-view property); at desk-molecule scale this is
 * far below frame budget.
 */

import * as THREE from "three";

import type { RenderNode, SphereNode } from "./scene.js";

const FLASH_COLOR = new THREE.Color(0.1, 1.0, 0.2);
const ANCHOR_COLOR = new THREE.Color(0.95, 0.1, 0.1);
const STICK_RADIUS = 0.07;
const FLASH_HZ = 2.0;

export class SceneRenderer {
  readonly scene: THREE.Scene;
  readonly camera: THREE.PerspectiveCamera;
  private renderer: THREE.WebGLRenderer;
  private moleculeGroup: THREE.Group;
  private sphereGeometry: THREE.SphereGeometry;
  private stickGeometry: THREE.CylinderGeometry;
  private flashingMaterials: THREE.MeshStandardMaterial[] = [];
  private spheresById = new Map<number, THREE.Mesh>();
  private labelLayer: HTMLElement;
  private labelAnchor: number | null = null;
  private labelTexts: string[] = [];

  constructor(canvas: HTMLCanvasElement, labelLayer: HTMLElement) {
    this.labelLayer = labelLayer;
    this.scene = new THREE.Scene();
    this.scene.background = new THREE.Color(0x10141c);
    this.camera = new THREE.PerspectiveCamera(50, 1, 0.1, 500);
    this.renderer = new THREE.WebGLRenderer({ canvas, antialias: true });
    this.moleculeGroup = new THREE.Group();
    this.scene.add(this.moleculeGroup);
    this.sphereGeometry = new THREE.SphereGeometry(1, 32, 16);
    this.stickGeometry = new THREE.CylinderGeometry(1, 1, 1, 12);

    const key = new THREE.DirectionalLight(0xffffff, 2.2);
    key.position.set(4, 7, 5);
    this.scene.add(key);
    this.scene.add(new THREE.AmbientLight(0xffffff, 0.45));

    this.resize();
  }

  resize(): void {
    const canvas = this.renderer.domElement;
    const width = canvas.clientWidth || canvas.width;
    const height = canvas.clientHeight || canvas.height;
    this.renderer.setSize(width, height, false);
    this.camera.aspect = width / height;
    this.camera.updateProjectionMatrix();
  }

  /** Replace all molecule objects with the given draw list. */
  setModel(nodes: RenderNode[]): void {
    for (const child of [...this.moleculeGroup.children]) {
      this.moleculeGroup.remove(child);
      const mesh = child as THREE.Mesh;
      if (mesh.material) {
        (mesh.material as THREE.Material).dispose();
      }
    }
    this.flashingMaterials = [];
    this.spheresById.clear();
    this.labelAnchor = null;
    this.labelTexts = [];

    for (const node of nodes) {
      if (node.kind === "sphere") {
        this.addSphere(node);
      } else if (node.kind === "stick") {
        const mesh = new THREE.Mesh(
          this.stickGeometry,
          new THREE.MeshStandardMaterial({ color: 0xd8d8d8, roughness: 0.4 })
        );
        const from = new THREE.Vector3(...node.from);
        const to = new THREE.Vector3(...node.to);
        const axis = to.clone().sub(from);
        mesh.scale.set(STICK_RADIUS, axis.length(), STICK_RADIUS);
        mesh.position.copy(from.clone().add(to).multiplyScalar(0.5));
        mesh.quaternion.setFromUnitVectors(new THREE.Vector3(0, 1, 0), axis.normalize());
        this.moleculeGroup.add(mesh);
      } else {
        this.labelAnchor = node.anchorAtom;
        this.labelTexts.push(node.text);
      }
    }
  }

  private addSphere(node: SphereNode): void {
    const [r, g, b] = node.color;
    const material = new THREE.MeshStandardMaterial({
      color: new THREE.Color(r / 255, g / 255, b / 255),
      roughness: 0.35,
      metalness: 0.05,
    });
    if (node.anchored) {
      material.color.lerp(ANCHOR_COLOR, 0.65);
      material.emissive.copy(ANCHOR_COLOR).multiplyScalar(0.35);
    }
    if (node.flashing) {
      material.emissive.copy(FLASH_COLOR);
      this.flashingMaterials.push(material);
    }
    const mesh = new THREE.Mesh(this.sphereGeometry, material);
    mesh.scale.setScalar(node.radius);
    mesh.position.set(...node.position);
    mesh.userData.atomId = node.id;
    this.moleculeGroup.add(mesh);
    this.spheresById.set(node.id, mesh);
  }

  /** Pulse the flash at 2 Hz and redraw; call from the animation loop. */
  frame(timeMs: number): void {
    const pulse = 0.5 + 0.5 * Math.sin((timeMs / 1000) * FLASH_HZ * 2 * Math.PI);
    for (const material of this.flashingMaterials) {
      material.emissiveIntensity = 0.3 + 0.7 * pulse;
    }
    this.renderer.render(this.scene, this.camera);
    this.placeLabels();
  }

  private placeLabels(): void {
    this.labelLayer.textContent = "";
    if (this.labelAnchor === null || this.labelTexts.length === 0) {
      return;
    }
    const mesh = this.spheresById.get(this.labelAnchor);
    if (!mesh) {
      return;
    }
    const projected = mesh.position.clone().project(this.camera);
    if (projected.z > 1) {
      return;
    }
    const canvas = this.renderer.domElement;
    const x = ((projected.x + 1) / 2) * canvas.clientWidth;
    const y = ((1 - projected.y) / 2) * canvas.clientHeight;
    const box = document.createElement("div");
    box.className = "angle-labels";
    box.style.left = `${Math.round(x) + 14}px`;
    box.style.top = `${Math.round(y)}px`;
    for (const text of this.labelTexts) {
      const row = document.createElement("div");
      row.textContent = text;
      box.appendChild(row);
    }
    this.labelLayer.appendChild(box);
  }
}
