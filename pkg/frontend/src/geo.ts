// Location handling. Raw coordinates exist only inside acquireDesignation:
// they go to the geocoding channel (a different origin than the report
// server) and only place names come back. Nothing outside this function ever
// sees a number.

import type { Designation, FetchLike, Resolution } from './api.js';

export interface FullDesignation {
  country: string;
  province: string;
  city: string;
}

export class GeolocationDenied extends Error {}
export class GeocoderUnavailable extends Error {}
export class UnknownLocation extends Error {}

export function coarsen(full: FullDesignation, resolution: Resolution): Designation {
  if (resolution === 'country') {
    return { country: full.country, resolution };
  }
  if (resolution === 'province') {
    return { country: full.country, province: full.province, resolution };
  }
  return { country: full.country, province: full.province, city: full.city, resolution };
}

export interface GeocoderChannel {
  locate(lat: number, lon: number): Promise<FullDesignation>;
}

// The geocoder endpoint is deployment configuration, pointed at a separate
// service so the party that sees coordinates never sees report content.
export class HttpGeocoderChannel implements GeocoderChannel {
  constructor(
    private url: string,
    private fetchFn: FetchLike = (...args) => globalThis.fetch(...args),
  ) {}

  async locate(lat: number, lon: number): Promise<FullDesignation> {
    let resp: Response;
    try {
      resp = await this.fetchFn(`${this.url}?lat=${lat}&lon=${lon}`);
    } catch (e) {
      throw new GeocoderUnavailable(String(e));
    }
    if (resp.status === 404) throw new UnknownLocation('no coverage for this location');
    if (!resp.ok) throw new GeocoderUnavailable(`geocoder returned ${resp.status}`);
    const doc = await resp.json();
    return { country: doc.country, province: doc.province, city: doc.city };
  }
}

export function browserPosition(
  geolocation: Geolocation | undefined = globalThis.navigator?.geolocation,
): Promise<GeolocationPosition> {
  if (!geolocation) return Promise.reject(new GeolocationDenied('geolocation unavailable'));
  return new Promise((resolve, reject) => {
    geolocation.getCurrentPosition(
      (pos) => resolve(pos),
      (err) => reject(new GeolocationDenied(err.message)),
      { enableHighAccuracy: false, timeout: 10000 },
    );
  });
}

export async function acquireDesignation(
  geocoder: GeocoderChannel,
  geolocation?: Geolocation,
): Promise<FullDesignation> {
  const pos = await browserPosition(geolocation);
  // coordinates stop here: only the geocoded names leave this scope
  return geocoder.locate(pos.coords.latitude, pos.coords.longitude);
}

// Designation centroids for the explore map come from the published geobox
// table (deploy-time data), never from reports: reports have no coordinates.
export interface GeoBox {
  country: string;
  province: string;
  city: string;
  lat_min: number;
  lat_max: number;
  lon_min: number;
  lon_max: number;
}

export interface Centroid {
  lat: number;
  lon: number;
}

export function centroidIndex(boxes: GeoBox[]): Map<string, Centroid> {
  const index = new Map<string, Centroid>();
  for (const box of boxes) {
    const centroid = {
      lat: (box.lat_min + box.lat_max) / 2,
      lon: (box.lon_min + box.lon_max) / 2,
    };
    index.set(box.country, index.get(box.country) ?? centroid);
    index.set(`${box.country}|${box.province}`, index.get(`${box.country}|${box.province}`) ?? centroid);
    index.set(`${box.country}|${box.province}|${box.city}`, centroid);
  }
  return index;
}
