/** Scenario editor: a form mirroring the config field-for-field.
 *
 * Client-side checks only gate the submit button with per-field
 * messages; the server's validation remains authoritative and its
 * field-level 422 responses are surfaced on the matching input.
 */

import { canonicalJson, defaultConfig, LEVELS, levelCaption, validateConfig } from "./config.js";
import type { FieldErrors } from "./config.js";
import type { Level, ScenarioConfig } from "./types.js";

interface NumberField {
  key: keyof ScenarioConfig;
  label: string;
  nullable?: boolean;
}

const NETWORK_FIELDS: NumberField[] = [
  { key: "stores", label: "stores" },
  { key: "distribution_centers", label: "distribution centers" },
  { key: "suppliers", label: "suppliers" },
  { key: "items", label: "items" },
  { key: "store_capacity", label: "store capacity (per item)" },
  { key: "dc_capacity", label: "DC capacity (per item)" },
];

const RUN_FIELDS: NumberField[] = [
  { key: "run_length_days", label: "run length (working days)" },
  { key: "warmup_days", label: "warm-up days" },
  { key: "replications", label: "replications" },
  { key: "master_seed", label: "master seed" },
  { key: "forecast_window", label: "forecast window (days)" },
  { key: "safety_window", label: "safety-stock window (days)" },
];

export class ScenarioEditor {
  readonly element: HTMLElement;
  private config: ScenarioConfig;
  private errorSlots = new Map<string, HTMLElement>();
  private submitButton: HTMLButtonElement;

  constructor(private onSubmit: (config: ScenarioConfig) => void) {
    this.config = defaultConfig();
    this.element = document.createElement("form");
    this.element.className = "scenario-editor";
    this.submitButton = document.createElement("button");
    this.render();
  }

  value(): ScenarioConfig {
    return structuredClone(this.config);
  }

  canonical(): string {
    return canonicalJson(this.config);
  }

  load(config: ScenarioConfig): void {
    this.config = structuredClone(config);
    this.render();
  }

  /** Show a server-side rejection on the offending field. */
  showServerError(field: string | undefined, message: string): void {
    const slot = field ? this.errorSlots.get(field) : undefined;
    if (slot) {
      slot.textContent = message;
    } else {
      const banner = this.element.querySelector(".form-banner") as HTMLElement;
      banner.textContent = message;
    }
  }

  private render(): void {
    this.element.textContent = "";
    this.errorSlots.clear();

    this.addTextField("name", "scenario name");
    this.addSection("Network", NETWORK_FIELDS);
    this.addFactorPicker("demand_intensity", "demand intensity", "intensity");
    this.addFactorPicker("demand_variability", "demand variability", "variability");
    this.addFactorPicker("lead_time_level", "lead time", "lead");
    this.addSection("Run", RUN_FIELDS);
    this.addCrnToggle();

    const banner = document.createElement("div");
    banner.className = "form-banner";
    this.element.appendChild(banner);

    this.submitButton = document.createElement("button");
    this.submitButton.type = "submit";
    this.submitButton.textContent = "Save scenario";
    this.element.appendChild(this.submitButton);
    this.element.addEventListener("submit", (event) => {
      event.preventDefault();
      if (Object.keys(validateConfig(this.config)).length === 0) {
        this.onSubmit(this.value());
      }
    });
    this.refreshValidation();
  }

  private addSection(title: string, fields: NumberField[]): void {
    const heading = document.createElement("h3");
    heading.textContent = title;
    this.element.appendChild(heading);
    for (const field of fields) {
      this.addNumberField(field);
    }
  }

  private addRow(labelText: string, input: HTMLElement, key: string): void {
    const row = document.createElement("label");
    row.className = "form-row";
    const caption = document.createElement("span");
    caption.textContent = labelText;
    const error = document.createElement("em");
    error.className = "field-error";
    this.errorSlots.set(key, error);
    row.append(caption, input, error);
    this.element.appendChild(row);
  }

  private addTextField(key: "name", label: string): void {
    const input = document.createElement("input");
    input.type = "text";
    input.value = this.config[key];
    input.addEventListener("input", () => {
      this.config[key] = input.value;
      this.refreshValidation();
    });
    this.addRow(label, input, key);
  }

  private addNumberField(field: NumberField): void {
    const input = document.createElement("input");
    input.type = "number";
    const current = this.config[field.key];
    input.value = current === null ? "" : String(current);
    input.addEventListener("input", () => {
      const raw = input.value.trim();
      let parsed: number | null = raw === "" ? null : Number(raw);
      if (parsed === null && !field.nullable) {
        parsed = Number.NaN;
      }
      (this.config as unknown as Record<string, unknown>)[field.key as string] = parsed;
      this.refreshValidation();
    });
    this.addRow(field.label, input, field.key as string);
  }

  private addFactorPicker(
    key: "demand_intensity" | "demand_variability" | "lead_time_level",
    label: string,
    factor: "intensity" | "variability" | "lead",
  ): void {
    const select = document.createElement("select");
    for (const level of LEVELS) {
      const option = document.createElement("option");
      option.value = level;
      option.textContent = `${level}  (${levelCaption(factor, level, this.config.intensity_mapping)})`;
      select.appendChild(option);
    }
    select.value = this.config[key];
    select.addEventListener("change", () => {
      this.config[key] = select.value as Level;
      this.refreshValidation();
    });
    this.addRow(label, select, key);
  }

  private addCrnToggle(): void {
    const input = document.createElement("input");
    input.type = "checkbox";
    input.checked = this.config.crn;
    input.addEventListener("change", () => {
      this.config.crn = input.checked;
      this.refreshValidation();
    });
    this.addRow("common random numbers (align streams across scenarios)", input, "crn");
  }

  private refreshValidation(): void {
    const errors: FieldErrors = validateConfig(this.config);
    for (const [key, slot] of this.errorSlots) {
      slot.textContent = errors[key] ?? "";
    }
    this.submitButton.disabled = Object.keys(errors).length > 0;
  }
}
