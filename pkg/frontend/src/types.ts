import { z } from "zod";

export const PHASES = [
  "OnLanding",
  "PostConsentAccept",
  "PostConsentReject",
  "Revisit",
] as const;
export type Phase = (typeof PHASES)[number];

export const ConsentActionSchema = z.enum(["AcceptAll", "RejectAll", "NoAction"]);
export type ConsentAction = z.infer<typeof ConsentActionSchema>;

export const CmpSelectorSchema = z.object({
  selector: z.string().min(1),
  action: z.enum(["accept", "reject"]),
});
export type CmpSelector = z.infer<typeof CmpSelectorSchema>;

export const CaptureJobSchema = z.object({
  site_url: z.string().url(),
  country: z.string().regex(/^[A-Za-z]{2}$/, "ISO 3166-1 alpha-2 code"),
  consent_action: ConsentActionSchema,
  cmp_selectors: z.array(CmpSelectorSchema).default([]),
  timeout_seconds: z.number().int().min(5).max(300).default(30),
});
export type CaptureJob = z.infer<typeof CaptureJobSchema>;

export const JobFileSchema = z.array(CaptureJobSchema).min(1);

// Cookie objects use the devtools key names verbatim; the auditing engine's
// published snapshot schema requires name/domain/path and tolerates the rest
// being absent.
export const SnapshotCookieSchema = z
  .object({
    name: z.string().min(1),
    domain: z.string(),
    path: z.string(),
    expires: z.number().optional(),
    httpOnly: z.boolean().optional(),
    priority: z.enum(["Low", "Medium", "High"]).optional(),
    sameParty: z.boolean().optional(),
    sameSite: z.string().optional(),
    secure: z.boolean().optional(),
    session: z.boolean().optional(),
    size: z.number().int().min(0).optional(),
    sourcePort: z.number().int().min(0).max(65535).optional(),
    sourceScheme: z.enum(["Secure", "NonSecure", "Unset"]).optional(),
    value: z.string().optional(),
  })
  .strict();
export type SnapshotCookie = z.infer<typeof SnapshotCookieSchema>;

export const SnapshotSchema = z
  .object({
    site_url: z.string(),
    country: z.string().regex(/^[A-Za-z]{2}$/),
    phase: z.enum(PHASES),
    captured_at: z.number().positive(),
    cmp_present: z.boolean(),
    cookies: z.array(SnapshotCookieSchema),
  })
  .superRefine((snapshot, ctx) => {
    const postConsent =
      snapshot.phase === "PostConsentAccept" || snapshot.phase === "PostConsentReject";
    if (postConsent && !snapshot.cmp_present) {
      ctx.addIssue({
        code: z.ZodIssueCode.custom,
        message: `phase ${snapshot.phase} requires cmp_present to be true`,
      });
    }
  });
export type Snapshot = z.infer<typeof SnapshotSchema>;

/** Cookie shape returned by the browser's Network.getAllCookies command. */
export interface DevtoolsCookie {
  name: string;
  value: string;
  domain: string;
  path: string;
  expires: number;
  size: number;
  httpOnly: boolean;
  secure: boolean;
  session: boolean;
  priority?: "Low" | "Medium" | "High";
  sameParty?: boolean;
  sourceScheme?: "Secure" | "NonSecure" | "Unset";
  sourcePort?: number;
  sameSite?: string;
}

export function toSnapshotCookie(cookie: DevtoolsCookie): SnapshotCookie {
  const out: SnapshotCookie = {
    name: cookie.name,
    domain: cookie.domain,
    path: cookie.path,
    expires: cookie.expires,
    httpOnly: cookie.httpOnly,
    secure: cookie.secure,
    session: cookie.session,
    size: cookie.size,
    value: cookie.value,
  };
  if (cookie.priority !== undefined) out.priority = cookie.priority;
  if (cookie.sameParty !== undefined) out.sameParty = cookie.sameParty;
  if (cookie.sourceScheme !== undefined) out.sourceScheme = cookie.sourceScheme;
  if (cookie.sourcePort !== undefined) out.sourcePort = cookie.sourcePort;
  if (cookie.sameSite !== undefined) out.sameSite = cookie.sameSite;
  return out;
}
