#!/usr/bin/env python3
"""Regenerates the fixture graphs and CSVs in this directory.

The outputs are committed; rerun only when changing fixture content, then
re-audit the counts asserted by the tests (f1.dcnf holds 312 statements).
"""
import random
from pathlib import Path

HERE = Path(__file__).resolve().parent

STATES = [
    ("01", "Alabama"), ("02", "Alaska"), ("04", "Arizona"), ("05", "Arkansas"),
    ("06", "California"), ("08", "Colorado"), ("09", "Connecticut"), ("10", "Delaware"),
    ("12", "Florida"), ("13", "Georgia"), ("15", "Hawaii"), ("16", "Idaho"),
    ("17", "Illinois"), ("18", "Indiana"), ("19", "Iowa"), ("20", "Kansas"),
    ("21", "Kentucky"), ("22", "Louisiana"), ("23", "Maine"), ("24", "Maryland"),
    ("25", "Massachusetts"), ("26", "Michigan"), ("27", "Minnesota"), ("28", "Mississippi"),
    ("29", "Missouri"), ("30", "Montana"), ("31", "Nebraska"), ("32", "Nevada"),
    ("33", "New Hampshire"), ("34", "New Jersey"), ("35", "New Mexico"), ("36", "New York"),
    ("37", "North Carolina"), ("38", "North Dakota"), ("39", "Ohio"), ("40", "Oklahoma"),
    ("41", "Oregon"), ("42", "Pennsylvania"), ("44", "Rhode Island"), ("45", "South Carolina"),
    ("46", "South Dakota"), ("47", "Tennessee"), ("48", "Texas"), ("49", "Utah"),
    ("50", "Vermont"), ("51", "Virginia"), ("53", "Washington"), ("54", "West Virginia"),
    ("55", "Wisconsin"), ("56", "Wyoming"),
]

STATE_POP_2020 = {
    "06": 39538223, "48": 29145505, "12": 21538187, "36": 20201249, "42": 13002700,
    "17": 12812508, "39": 11799448, "13": 10711908, "37": 10439388, "26": 10077331,
}

CA_COUNTIES = [("06001", "Alameda County"), ("06037", "Los Angeles County"),
               ("06075", "San Francisco County"), ("06085", "Santa Clara County")]
COUNTY_INCOME_2020 = {"06001": 112017, "06037": 71358, "06075": 119136, "06085": 130890}


def block(lines):
    return "\n".join(lines) + "\n"


def obs(dcid, var, about, date, value, unit=None):
    lines = [f"dcid: {dcid}", "typeOf: dcid:StatVarObservation",
             f"variableMeasured: dcid:{var}", f"observationAbout: dcid:{about}",
             f"observationDate: {date}", f"value: {value}"]
    if unit:
        lines.append(f"unit: dcid:{unit}")
    return block(lines)


def provenance(dcid, source, name, date):
    return block([f"@provenance {dcid}", f"@source {source}", f"@importName {name}",
                  f"@importDate {date}"])


def f1():
    out = ["# F1: base fixture graph. Two countries, the 50 US states, a few\n"
           "# California counties, core statistical variables and observations.\n"]
    out.append(provenance("prov/fixture-places", "https://example.org/fixture/places",
                          "fixture places", "2024-01-15"))
    out.append(block(["dcid: country/GEO", "typeOf: dcid:Country", 'name: "Georgia"']))
    out.append(block(["dcid: country/HRV", "typeOf: dcid:Country", 'name: "Croatia"']))
    for fips, name in STATES:
        lines = [f"dcid: geoId/{fips}", "typeOf: dcid:AdministrativeArea1", f'name: "{name}"',
                 "containedInPlace: dcid:country/USA"]
        if fips == "06":
            lines += ["location: [36.78 -119.42]", "area: [423970 SquareKilometer]"]
        if fips == "13":
            lines += ["location: [32.17 -82.9]"]
        out.append(block(lines))
    for fips, name in CA_COUNTIES:
        out.append(block([f"dcid: geoId/{fips}", "typeOf: dcid:AdministrativeArea2",
                          f'name: "{name}"', "containedInPlace: dcid:geoId/06"]))
    out.append(block(["dcid: geoId/13121", "typeOf: dcid:AdministrativeArea2",
                      'name: "Fulton County"', "containedInPlace: dcid:geoId/13"]))

    out.append(provenance("prov/fixture-vars", "https://example.org/fixture/vars",
                          "fixture variables", "2024-01-15"))
    out.append(block(["dcid: dc/var/TotalPop", "typeOf: dcid:StatisticalVariable",
                      'name: "Total Population"', 'description: "Count of all persons"',
                      "populationType: dcid:Person", "measuredProperty: dcid:count",
                      "statType: dcid:count"]))
    out.append(block(["dcid: dc/var/HispanicFemalePop", "typeOf: dcid:StatisticalVariable",
                      'name: "Population: Hispanic, Female"', "populationType: dcid:Person",
                      "measuredProperty: dcid:count", "statType: dcid:count",
                      "constraintProperties: dcid:gender", "constraintProperties: dcid:race",
                      "gender: dcid:Female", "race: dcid:Hispanic"]))
    out.append(block(["dcid: dc/var/MedianIncome", "typeOf: dcid:StatisticalVariable",
                      'name: "Median Household Income"', "populationType: dcid:Household",
                      "measuredProperty: dcid:income", "statType: dcid:median",
                      "unit: dcid:USDollar"]))

    out.append(provenance("prov/fixture-census", "https://example.org/fixture/census",
                          "fixture census", "2023-06-01"))
    hrv = {2017: 4124531, 2018: 4087843, 2019: 4080000, 2020: 4047680, 2021: 3899000}
    for year, value in hrv.items():
        out.append(obs(f"dc/o/hrv-pop-{year}", "dc/var/TotalPop", "country/HRV", year, value))
    out.append(obs("dc/o/geo-pop-2019", "dc/var/TotalPop", "country/GEO", 2019, 3720000))
    for fips, value in STATE_POP_2020.items():
        out.append(obs(f"dc/o/{fips}-pop-2020", "dc/var/TotalPop", f"geoId/{fips}", 2020, value))
    out.append(obs("dc/o/06075-pop-2020", "dc/var/TotalPop", "geoId/06075", 2020, 873965))
    out.append(obs("dc/o/06-hispfem-2020", "dc/var/HispanicFemalePop", "geoId/06", 2020,
                   7733024))
    for fips, value in COUNTY_INCOME_2020.items():
        out.append(obs(f"dc/o/{fips}-income-2020", "dc/var/MedianIncome", f"geoId/{fips}",
                       2020, value, "USDollar"))

    # An older second source for one date; the census value is preferred.
    out.append(provenance("prov/fixture-eurostat", "https://example.org/fixture/eurostat",
                          "fixture eurostat", "2022-03-01"))
    out.append(obs("dc/o/hrv-pop-2019-eurostat", "dc/var/TotalPop", "country/HRV", 2019,
                   4076246))
    return "\n".join(out)


def f2():
    out = ["# F2: overlay fixture in the style of a food-security instance layered on\n"
           "# F1. Adds its own variables and county observations.\n"]
    out.append(provenance("prov/fixture-food", "https://example.org/fixture/food",
                          "fixture food security", "2024-05-01"))
    out.append(block(["dcid: foodInsecurityRate", "typeOf: dcid:Property",
                      'name: "food insecurity rate"', "domainIncludes: dcid:Person",
                      "rangeIncludes: dcid:Number"]))
    out.append(block(["dcid: mealGap", "typeOf: dcid:Property", 'name: "meal gap"',
                      "domainIncludes: dcid:Person", "rangeIncludes: dcid:Number"]))
    out.append(block(["dcid: dc/var/FoodInsecurityRate", "typeOf: dcid:StatisticalVariable",
                      'name: "Food Insecurity Rate"', "populationType: dcid:Person",
                      "measuredProperty: dcid:foodInsecurityRate",
                      "statType: dcid:measuredValue", "unit: dcid:Percent"]))
    out.append(block(["dcid: dc/var/MealGap", "typeOf: dcid:StatisticalVariable",
                      'name: "Annual Meal Gap"', "populationType: dcid:Person",
                      "measuredProperty: dcid:mealGap", "statType: dcid:measuredValue"]))
    out.append(block(["dcid: geoId/06019", "typeOf: dcid:AdministrativeArea2",
                      'name: "Fresno County"', "containedInPlace: dcid:geoId/06"]))
    rates = {"06001": "9.1", "06037": "11.2", "06075": "8.7", "06019": "13.4",
             "06": "10.6", "13": "12.4"}
    gaps = {"06001": 23467000, "06037": 201458000, "06075": 12987000, "06019": 27905000}
    for fips, value in rates.items():
        out.append(obs(f"dc/o/fa/{fips}-fir-2021", "dc/var/FoodInsecurityRate", f"geoId/{fips}",
                       2021, value, "Percent"))
    for fips, value in gaps.items():
        out.append(obs(f"dc/o/fa/{fips}-mealgap-2021", "dc/var/MealGap", f"geoId/{fips}", 2021,
                       value))
    return "\n".join(out)


def f3():
    out = ["# F3: small third layer (a city health department) used for chain\n"
           "# topologies on top of F2 and F1.\n"]
    out.append(provenance("prov/fixture-health", "https://example.org/fixture/health",
                          "fixture city health", "2024-07-01"))
    out.append(block(["dcid: obesityPrevalence", "typeOf: dcid:Property",
                      'name: "obesity prevalence"', "domainIncludes: dcid:Person",
                      "rangeIncludes: dcid:Number"]))
    out.append(block(["dcid: dc/var/ObesityRate", "typeOf: dcid:StatisticalVariable",
                      'name: "Adult Obesity Rate"', "populationType: dcid:Person",
                      "measuredProperty: dcid:obesityPrevalence", "statType: dcid:measuredValue",
                      "unit: dcid:Percent"]))
    out.append(block(["dcid: geoId/0667000", "typeOf: dcid:City", 'name: "San Francisco"',
                      "containedInPlace: dcid:geoId/06075"]))
    for year, value in {2019: "19.9", 2020: "20.4", 2021: "21.0"}.items():
        out.append(obs(f"dc/o/sf/obesity-{year}", "dc/var/ObesityRate", "geoId/06075", year,
                       value, "Percent"))
    out.append(obs("dc/o/sf/obesity-city-2021", "dc/var/ObesityRate", "geoId/0667000", 2021,
                   "22.3", "Percent"))
    return "\n".join(out)


def states_csv():
    rng = random.Random(20240201)
    misspelled = {"California": "Calfornia", "New York": "Nwe York", "Texas": "Texass"}
    rows = ["State,Population,MedianHouseholdIncome"]
    for i, (_, name) in enumerate(STATES):
        pop = rng.randint(570000, 39500000)
        income = rng.randint(46000, 95000)
        shown = misspelled.get(name, name)
        pop_cell = f'"{pop:,}"' if i % 3 == 0 else str(pop)
        state_cell = f'"{shown}"' if " " in shown else shown
        rows.append(f"{state_cell},{pop_cell},{income}")
    return "\r\n".join(rows) + "\r\n"


STATES_TEMPLATE = '''# Maps fixtures/states.csv onto F1 states and variables.

[entity]
column = "State"
description = { name = "{}", typeOf = "AdministrativeArea1" }

[date]
fixed = "2021"

[[variables]]
column = "Population"
variable = "dc/var/TotalPop"

[[variables]]
column = "MedianHouseholdIncome"
variable = "dc/var/MedianIncome"
unit = "USDollar"

[provenance]
dcid = "prov/fixture-acs"
source_url = "https://example.org/fixture/acs"
import_name = "fixture state survey"
import_date = "2024-02-01"
'''

if __name__ == "__main__":
    (HERE / "f1.dcnf").write_text(f1())
    (HERE / "f2.dcnf").write_text(f2())
    (HERE / "f3.dcnf").write_text(f3())
    (HERE / "states.csv").write_bytes(states_csv().encode())
    (HERE / "states.toml").write_text(STATES_TEMPLATE)
