"""Symmetric quadrature rules on triangles.

Rules are stored in barycentric coordinates with weights summing to one
(multiply by the element area).  All nodes lie strictly inside the triangle,
so integrands are never sampled at mesh vertices.  Every rule has positive
weights and is fully symmetric under permutation of the barycentric
coordinates.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np

_RULES = {
    2: np.array([
        [0.16666666666666671, 0.16666666666666671, 0.66666666666666652, 0.33333333333333331],
        [0.16666666666666671, 0.66666666666666652, 0.16666666666666671, 0.33333333333333331],
        [0.66666666666666652, 0.16666666666666671, 0.16666666666666671, 0.33333333333333331],
    ]),
    4: np.array([
        [0.44594849091596478, 0.44594849091596478, 0.10810301816807044, 0.22338158967801142],
        [0.44594849091596478, 0.10810301816807044, 0.44594849091596478, 0.22338158967801142],
        [0.10810301816807044, 0.44594849091596478, 0.44594849091596478, 0.22338158967801142],
        [0.091576213509770826, 0.091576213509770826, 0.81684757298045829, 0.10995174365532197],
        [0.091576213509770826, 0.81684757298045829, 0.091576213509770826, 0.10995174365532197],
        [0.81684757298045829, 0.091576213509770826, 0.091576213509770826, 0.10995174365532197],
    ]),
    5: np.array([
        [0.33333333333333331, 0.33333333333333331, 0.33333333333333331, 0.22499999999999026],
        [0.4701420641051135, 0.4701420641051135, 0.059715871789773001, 0.13239415278851005],
        [0.4701420641051135, 0.059715871789773001, 0.4701420641051135, 0.13239415278851005],
        [0.059715871789773001, 0.4701420641051135, 0.4701420641051135, 0.13239415278851005],
        [0.10128650732345604, 0.10128650732345604, 0.79742698535308798, 0.12593918054482653],
        [0.10128650732345604, 0.79742698535308798, 0.10128650732345604, 0.12593918054482653],
        [0.79742698535308798, 0.10128650732345604, 0.10128650732345604, 0.12593918054482653],
    ]),
    6: np.array([
        [0.063089014491501533, 0.063089014491501533, 0.87382197101699699, 0.050844906370206035],
        [0.063089014491501533, 0.87382197101699699, 0.063089014491501533, 0.050844906370206035],
        [0.87382197101699699, 0.063089014491501533, 0.063089014491501533, 0.050844906370206035],
        [0.24928674517091182, 0.24928674517091182, 0.50142650965817637, 0.11678627572637566],
        [0.24928674517091182, 0.50142650965817637, 0.24928674517091182, 0.11678627572637566],
        [0.50142650965817637, 0.24928674517091182, 0.24928674517091182, 0.11678627572637566],
        [0.053145049844818909, 0.63650249912139822, 0.31035245103378284, 0.082851075618375819],
        [0.63650249912139822, 0.053145049844818909, 0.31035245103378284, 0.082851075618375819],
        [0.63650249912139822, 0.31035245103378284, 0.053145049844818909, 0.082851075618375819],
        [0.31035245103378284, 0.63650249912139822, 0.053145049844818909, 0.082851075618375819],
        [0.053145049844818909, 0.31035245103378284, 0.63650249912139822, 0.082851075618375819],
        [0.31035245103378284, 0.053145049844818909, 0.63650249912139822, 0.082851075618375819],
    ]),
    8: np.array([
        [0.33333333333333331, 0.33333333333333331, 0.33333333333333331, 0.14431560767760118],
        [0.17056930775162174, 0.17056930775162174, 0.65886138449675657, 0.10321737053473115],
        [0.17056930775162174, 0.65886138449675657, 0.17056930775162174, 0.10321737053473115],
        [0.65886138449675657, 0.17056930775162174, 0.17056930775162174, 0.10321737053473115],
        [0.050547228317034391, 0.050547228317034391, 0.8989055433659312, 0.032458497623213275],
        [0.050547228317034391, 0.8989055433659312, 0.050547228317034391, 0.032458497623213275],
        [0.8989055433659312, 0.050547228317034391, 0.050547228317034391, 0.032458497623213275],
        [0.45929258829259839, 0.45929258829259839, 0.081414823414803217, 0.095091634267406383],
        [0.45929258829259839, 0.081414823414803217, 0.45929258829259839, 0.095091634267406383],
        [0.081414823414803217, 0.45929258829259839, 0.45929258829259839, 0.095091634267406383],
        [0.0083947774097863359, 0.72849239295516999, 0.26311282963504368, 0.027230314174391076],
        [0.26311282963504368, 0.72849239295516999, 0.0083947774097863359, 0.027230314174391076],
        [0.26311282963504368, 0.0083947774097863359, 0.72849239295516999, 0.027230314174391076],
        [0.72849239295516999, 0.26311282963504368, 0.0083947774097863359, 0.027230314174391076],
        [0.0083947774097863359, 0.26311282963504368, 0.72849239295516999, 0.027230314174391076],
        [0.72849239295516999, 0.0083947774097863359, 0.26311282963504368, 0.027230314174391076],
    ]),
    9: np.array([
        [0.33333333333333331, 0.33333333333333331, 0.33333333333333331, 0.09713579624500833],
        [0.18820353560870051, 0.18820353560870051, 0.62359292878259898, 0.079647738927375603],
        [0.18820353560870051, 0.62359292878259898, 0.18820353560870051, 0.079647738927375603],
        [0.62359292878259898, 0.18820353560870051, 0.18820353560870051, 0.079647738927375603],
        [0.48968251918144978, 0.48968251918144978, 0.020634961637100435, 0.031334700258279981],
        [0.48968251918144978, 0.020634961637100435, 0.48968251918144978, 0.031334700258279981],
        [0.020634961637100435, 0.48968251918144978, 0.48968251918144978, 0.031334700258279981],
        [0.044729513395552097, 0.044729513395552097, 0.91054097320889582, 0.025577675659927038],
        [0.044729513395552097, 0.91054097320889582, 0.044729513395552097, 0.025577675659927038],
        [0.91054097320889582, 0.044729513395552097, 0.044729513395552097, 0.025577675659927038],
        [0.43708959146573406, 0.43708959146573406, 0.12582081706853188, 0.077827540992912531],
        [0.43708959146573406, 0.12582081706853188, 0.43708959146573406, 0.077827540992912531],
        [0.12582081706853188, 0.43708959146573406, 0.43708959146573406, 0.077827540992912531],
        [0.2219629891665115, 0.74119859878326577, 0.036838412050222806, 0.043283539373251044],
        [0.036838412050222806, 0.74119859878326577, 0.2219629891665115, 0.043283539373251044],
        [0.036838412050222806, 0.2219629891665115, 0.74119859878326577, 0.043283539373251044],
        [0.74119859878326577, 0.2219629891665115, 0.036838412050222806, 0.043283539373251044],
        [0.74119859878326577, 0.036838412050222806, 0.2219629891665115, 0.043283539373251044],
        [0.2219629891665115, 0.036838412050222806, 0.74119859878326577, 0.043283539373251044],
    ]),
    10: np.array([
        [0.9379082062257551, 0.029316427159784941, 0.032775366614459879, 0.0020647551175529532],
        [0.80625433124538759, 0.029316427159784941, 0.16442924159482744, 0.0043477981100276215],
        [0.60115364846783836, 0.029316427159784941, 0.36952992437237664, 0.0056391685600042374],
        [0.36952992437237664, 0.029316427159784941, 0.60115364846783836, 0.0056391685600042374],
        [0.16442924159482741, 0.029316427159784941, 0.80625433124538759, 0.0043477981100276215],
        [0.0327753666144599, 0.029316427159784941, 0.9379082062257551, 0.0020647551175529532],
        [0.82315606731895652, 0.1480785996684843, 0.028765333012559118, 0.0038702915889991685],
        [0.70760991338109902, 0.1480785996684843, 0.14431148695041665, 0.0081497540860192719],
        [0.52760309574273967, 0.1480785996684843, 0.32431830458877597, 0.010570370530234666],
        [0.32431830458877597, 0.1480785996684843, 0.52760309574273967, 0.010570370530234666],
        [0.14431148695041662, 0.1480785996684843, 0.70760991338109902, 0.0081497540860192719],
        [0.028765333012559124, 0.1480785996684843, 0.82315606731895652, 0.0038702915889991685],
        [0.64062843674081504, 0.3369846902811543, 0.022386872978030627, 0.0040202021347550279],
        [0.55070362793789196, 0.3369846902811543, 0.1123116817809537, 0.0084654238630158755],
        [0.41061174164232772, 0.3369846902811543, 0.25240356807651798, 0.010979799633595558],
        [0.25240356807651798, 0.3369846902811543, 0.41061174164232772, 0.010979799633595558],
        [0.11231168178095374, 0.3369846902811543, 0.55070362793789196, 0.0084654238630158755],
        [0.022386872978030659, 0.3369846902811543, 0.64062843674081504, 0.0040202021347550279],
        [0.42642691786177866, 0.55867151877155019, 0.014901563366671153, 0.0028171785989810354],
        [0.36656950776580072, 0.55867151877155019, 0.074758973462649092, 0.0059321919990087532],
        [0.27331896210725798, 0.55867151877155019, 0.16800951912119183, 0.0076941545504527415],
        [0.16800951912119183, 0.55867151877155019, 0.27331896210725798, 0.0076941545504527415],
        [0.074758973462649092, 0.55867151877155019, 0.36656950776580072, 0.0059321919990087532],
        [0.014901563366671144, 0.55867151877155019, 0.42642691786177866, 0.0028171785989810354],
        [0.22297426326865907, 0.7692338620300545, 0.007791874701286429, 0.0012550994042305557],
        [0.19167543723712124, 0.7692338620300545, 0.039090700732824245, 0.0026428891112654927],
        [0.1429156829939483, 0.7692338620300545, 0.08785045497599718, 0.0034278724095887763],
        [0.087850454975997194, 0.7692338620300545, 0.1429156829939483, 0.0034278724095887763],
        [0.039090700732824252, 0.7692338620300545, 0.19167543723712124, 0.0026428891112654927],
        [0.007791874701286422, 0.7692338620300545, 0.22297426326865907, 0.0012550994042305557],
        [0.070587631527588721, 0.92694567131974104, 0.0024666971526702448, 0.00024951418707877239],
        [0.060679268262818914, 0.92694567131974104, 0.012375060417440052, 0.00052540725134119577],
        [0.045243246564898351, 0.92694567131974104, 0.027811082115360607, 0.00068146219718161953],
        [0.027811082115360604, 0.92694567131974104, 0.045243246564898358, 0.00068146219718161953],
        [0.012375060417440055, 0.92694567131974104, 0.060679268262818907, 0.00052540725134119577],
        [0.0024666971526702414, 0.92694567131974104, 0.070587631527588721, 0.00024951418707877239],
        [0.9379082062257551, 0.032775366614459879, 0.029316427159784941, 0.0020647551175529532],
        [0.80625433124538759, 0.16442924159482744, 0.029316427159784941, 0.0043477981100276215],
        [0.60115364846783836, 0.36952992437237664, 0.029316427159784941, 0.0056391685600042374],
        [0.36952992437237664, 0.60115364846783836, 0.029316427159784941, 0.0056391685600042374],
        [0.16442924159482741, 0.80625433124538759, 0.029316427159784941, 0.0043477981100276215],
        [0.0327753666144599, 0.9379082062257551, 0.029316427159784941, 0.0020647551175529532],
        [0.82315606731895652, 0.028765333012559118, 0.1480785996684843, 0.0038702915889991685],
        [0.70760991338109902, 0.14431148695041665, 0.1480785996684843, 0.0081497540860192719],
        [0.52760309574273967, 0.32431830458877597, 0.1480785996684843, 0.010570370530234666],
        [0.32431830458877597, 0.52760309574273967, 0.1480785996684843, 0.010570370530234666],
        [0.14431148695041662, 0.70760991338109902, 0.1480785996684843, 0.0081497540860192719],
        [0.028765333012559124, 0.82315606731895652, 0.1480785996684843, 0.0038702915889991685],
        [0.64062843674081504, 0.022386872978030627, 0.3369846902811543, 0.0040202021347550279],
        [0.55070362793789196, 0.1123116817809537, 0.3369846902811543, 0.0084654238630158755],
        [0.41061174164232772, 0.25240356807651798, 0.3369846902811543, 0.010979799633595558],
        [0.25240356807651798, 0.41061174164232772, 0.3369846902811543, 0.010979799633595558],
        [0.11231168178095374, 0.55070362793789196, 0.3369846902811543, 0.0084654238630158755],
        [0.022386872978030659, 0.64062843674081504, 0.3369846902811543, 0.0040202021347550279],
        [0.42642691786177866, 0.014901563366671153, 0.55867151877155019, 0.0028171785989810354],
        [0.36656950776580072, 0.074758973462649092, 0.55867151877155019, 0.0059321919990087532],
        [0.27331896210725798, 0.16800951912119183, 0.55867151877155019, 0.0076941545504527415],
        [0.16800951912119183, 0.27331896210725798, 0.55867151877155019, 0.0076941545504527415],
        [0.074758973462649092, 0.36656950776580072, 0.55867151877155019, 0.0059321919990087532],
        [0.014901563366671144, 0.42642691786177866, 0.55867151877155019, 0.0028171785989810354],
        [0.22297426326865907, 0.007791874701286429, 0.7692338620300545, 0.0012550994042305557],
        [0.19167543723712124, 0.039090700732824245, 0.7692338620300545, 0.0026428891112654927],
        [0.1429156829939483, 0.08785045497599718, 0.7692338620300545, 0.0034278724095887763],
        [0.087850454975997194, 0.1429156829939483, 0.7692338620300545, 0.0034278724095887763],
        [0.039090700732824252, 0.19167543723712124, 0.7692338620300545, 0.0026428891112654927],
        [0.007791874701286422, 0.22297426326865907, 0.7692338620300545, 0.0012550994042305557],
        [0.070587631527588721, 0.0024666971526702448, 0.92694567131974104, 0.00024951418707877239],
        [0.060679268262818914, 0.012375060417440052, 0.92694567131974104, 0.00052540725134119577],
        [0.045243246564898351, 0.027811082115360607, 0.92694567131974104, 0.00068146219718161953],
        [0.027811082115360604, 0.045243246564898358, 0.92694567131974104, 0.00068146219718161953],
        [0.012375060417440055, 0.060679268262818907, 0.92694567131974104, 0.00052540725134119577],
        [0.0024666971526702414, 0.070587631527588721, 0.92694567131974104, 0.00024951418707877239],
        [0.029316427159784941, 0.9379082062257551, 0.032775366614459879, 0.0020647551175529532],
        [0.029316427159784941, 0.80625433124538759, 0.16442924159482744, 0.0043477981100276215],
        [0.029316427159784941, 0.60115364846783836, 0.36952992437237664, 0.0056391685600042374],
        [0.029316427159784941, 0.36952992437237664, 0.60115364846783836, 0.0056391685600042374],
        [0.029316427159784941, 0.16442924159482741, 0.80625433124538759, 0.0043477981100276215],
        [0.029316427159784941, 0.0327753666144599, 0.9379082062257551, 0.0020647551175529532],
        [0.1480785996684843, 0.82315606731895652, 0.028765333012559118, 0.0038702915889991685],
        [0.1480785996684843, 0.70760991338109902, 0.14431148695041665, 0.0081497540860192719],
        [0.1480785996684843, 0.52760309574273967, 0.32431830458877597, 0.010570370530234666],
        [0.1480785996684843, 0.32431830458877597, 0.52760309574273967, 0.010570370530234666],
        [0.1480785996684843, 0.14431148695041662, 0.70760991338109902, 0.0081497540860192719],
        [0.1480785996684843, 0.028765333012559124, 0.82315606731895652, 0.0038702915889991685],
        [0.3369846902811543, 0.64062843674081504, 0.022386872978030627, 0.0040202021347550279],
        [0.3369846902811543, 0.55070362793789196, 0.1123116817809537, 0.0084654238630158755],
        [0.3369846902811543, 0.41061174164232772, 0.25240356807651798, 0.010979799633595558],
        [0.3369846902811543, 0.25240356807651798, 0.41061174164232772, 0.010979799633595558],
        [0.3369846902811543, 0.11231168178095374, 0.55070362793789196, 0.0084654238630158755],
        [0.3369846902811543, 0.022386872978030659, 0.64062843674081504, 0.0040202021347550279],
        [0.55867151877155019, 0.42642691786177866, 0.014901563366671153, 0.0028171785989810354],
        [0.55867151877155019, 0.36656950776580072, 0.074758973462649092, 0.0059321919990087532],
        [0.55867151877155019, 0.27331896210725798, 0.16800951912119183, 0.0076941545504527415],
        [0.55867151877155019, 0.16800951912119183, 0.27331896210725798, 0.0076941545504527415],
        [0.55867151877155019, 0.074758973462649092, 0.36656950776580072, 0.0059321919990087532],
        [0.55867151877155019, 0.014901563366671144, 0.42642691786177866, 0.0028171785989810354],
        [0.7692338620300545, 0.22297426326865907, 0.007791874701286429, 0.0012550994042305557],
        [0.7692338620300545, 0.19167543723712124, 0.039090700732824245, 0.0026428891112654927],
        [0.7692338620300545, 0.1429156829939483, 0.08785045497599718, 0.0034278724095887763],
        [0.7692338620300545, 0.087850454975997194, 0.1429156829939483, 0.0034278724095887763],
        [0.7692338620300545, 0.039090700732824252, 0.19167543723712124, 0.0026428891112654927],
        [0.7692338620300545, 0.007791874701286422, 0.22297426326865907, 0.0012550994042305557],
        [0.92694567131974104, 0.070587631527588721, 0.0024666971526702448, 0.00024951418707877239],
        [0.92694567131974104, 0.060679268262818914, 0.012375060417440052, 0.00052540725134119577],
        [0.92694567131974104, 0.045243246564898351, 0.027811082115360607, 0.00068146219718161953],
        [0.92694567131974104, 0.027811082115360604, 0.045243246564898358, 0.00068146219718161953],
        [0.92694567131974104, 0.012375060417440055, 0.060679268262818907, 0.00052540725134119577],
        [0.92694567131974104, 0.0024666971526702414, 0.070587631527588721, 0.00024951418707877239],
        [0.029316427159784941, 0.032775366614459879, 0.9379082062257551, 0.0020647551175529532],
        [0.029316427159784941, 0.16442924159482744, 0.80625433124538759, 0.0043477981100276215],
        [0.029316427159784941, 0.36952992437237664, 0.60115364846783836, 0.0056391685600042374],
        [0.029316427159784941, 0.60115364846783836, 0.36952992437237664, 0.0056391685600042374],
        [0.029316427159784941, 0.80625433124538759, 0.16442924159482741, 0.0043477981100276215],
        [0.029316427159784941, 0.9379082062257551, 0.0327753666144599, 0.0020647551175529532],
        [0.1480785996684843, 0.028765333012559118, 0.82315606731895652, 0.0038702915889991685],
        [0.1480785996684843, 0.14431148695041665, 0.70760991338109902, 0.0081497540860192719],
        [0.1480785996684843, 0.32431830458877597, 0.52760309574273967, 0.010570370530234666],
        [0.1480785996684843, 0.52760309574273967, 0.32431830458877597, 0.010570370530234666],
        [0.1480785996684843, 0.70760991338109902, 0.14431148695041662, 0.0081497540860192719],
        [0.1480785996684843, 0.82315606731895652, 0.028765333012559124, 0.0038702915889991685],
        [0.3369846902811543, 0.022386872978030627, 0.64062843674081504, 0.0040202021347550279],
        [0.3369846902811543, 0.1123116817809537, 0.55070362793789196, 0.0084654238630158755],
        [0.3369846902811543, 0.25240356807651798, 0.41061174164232772, 0.010979799633595558],
        [0.3369846902811543, 0.41061174164232772, 0.25240356807651798, 0.010979799633595558],
        [0.3369846902811543, 0.55070362793789196, 0.11231168178095374, 0.0084654238630158755],
        [0.3369846902811543, 0.64062843674081504, 0.022386872978030659, 0.0040202021347550279],
        [0.55867151877155019, 0.014901563366671153, 0.42642691786177866, 0.0028171785989810354],
        [0.55867151877155019, 0.074758973462649092, 0.36656950776580072, 0.0059321919990087532],
        [0.55867151877155019, 0.16800951912119183, 0.27331896210725798, 0.0076941545504527415],
        [0.55867151877155019, 0.27331896210725798, 0.16800951912119183, 0.0076941545504527415],
        [0.55867151877155019, 0.36656950776580072, 0.074758973462649092, 0.0059321919990087532],
        [0.55867151877155019, 0.42642691786177866, 0.014901563366671144, 0.0028171785989810354],
        [0.7692338620300545, 0.007791874701286429, 0.22297426326865907, 0.0012550994042305557],
        [0.7692338620300545, 0.039090700732824245, 0.19167543723712124, 0.0026428891112654927],
        [0.7692338620300545, 0.08785045497599718, 0.1429156829939483, 0.0034278724095887763],
        [0.7692338620300545, 0.1429156829939483, 0.087850454975997194, 0.0034278724095887763],
        [0.7692338620300545, 0.19167543723712124, 0.039090700732824252, 0.0026428891112654927],
        [0.7692338620300545, 0.22297426326865907, 0.007791874701286422, 0.0012550994042305557],
        [0.92694567131974104, 0.0024666971526702448, 0.070587631527588721, 0.00024951418707877239],
        [0.92694567131974104, 0.012375060417440052, 0.060679268262818914, 0.00052540725134119577],
        [0.92694567131974104, 0.027811082115360607, 0.045243246564898351, 0.00068146219718161953],
        [0.92694567131974104, 0.045243246564898358, 0.027811082115360604, 0.00068146219718161953],
        [0.92694567131974104, 0.060679268262818907, 0.012375060417440055, 0.00052540725134119577],
        [0.92694567131974104, 0.070587631527588721, 0.0024666971526702414, 0.00024951418707877239],
        [0.032775366614459879, 0.9379082062257551, 0.029316427159784941, 0.0020647551175529532],
        [0.16442924159482744, 0.80625433124538759, 0.029316427159784941, 0.0043477981100276215],
        [0.36952992437237664, 0.60115364846783836, 0.029316427159784941, 0.0056391685600042374],
        [0.60115364846783836, 0.36952992437237664, 0.029316427159784941, 0.0056391685600042374],
        [0.80625433124538759, 0.16442924159482741, 0.029316427159784941, 0.0043477981100276215],
        [0.9379082062257551, 0.0327753666144599, 0.029316427159784941, 0.0020647551175529532],
        [0.028765333012559118, 0.82315606731895652, 0.1480785996684843, 0.0038702915889991685],
        [0.14431148695041665, 0.70760991338109902, 0.1480785996684843, 0.0081497540860192719],
        [0.32431830458877597, 0.52760309574273967, 0.1480785996684843, 0.010570370530234666],
        [0.52760309574273967, 0.32431830458877597, 0.1480785996684843, 0.010570370530234666],
        [0.70760991338109902, 0.14431148695041662, 0.1480785996684843, 0.0081497540860192719],
        [0.82315606731895652, 0.028765333012559124, 0.1480785996684843, 0.0038702915889991685],
        [0.022386872978030627, 0.64062843674081504, 0.3369846902811543, 0.0040202021347550279],
        [0.1123116817809537, 0.55070362793789196, 0.3369846902811543, 0.0084654238630158755],
        [0.25240356807651798, 0.41061174164232772, 0.3369846902811543, 0.010979799633595558],
        [0.41061174164232772, 0.25240356807651798, 0.3369846902811543, 0.010979799633595558],
        [0.55070362793789196, 0.11231168178095374, 0.3369846902811543, 0.0084654238630158755],
        [0.64062843674081504, 0.022386872978030659, 0.3369846902811543, 0.0040202021347550279],
        [0.014901563366671153, 0.42642691786177866, 0.55867151877155019, 0.0028171785989810354],
        [0.074758973462649092, 0.36656950776580072, 0.55867151877155019, 0.0059321919990087532],
        [0.16800951912119183, 0.27331896210725798, 0.55867151877155019, 0.0076941545504527415],
        [0.27331896210725798, 0.16800951912119183, 0.55867151877155019, 0.0076941545504527415],
        [0.36656950776580072, 0.074758973462649092, 0.55867151877155019, 0.0059321919990087532],
        [0.42642691786177866, 0.014901563366671144, 0.55867151877155019, 0.0028171785989810354],
        [0.007791874701286429, 0.22297426326865907, 0.7692338620300545, 0.0012550994042305557],
        [0.039090700732824245, 0.19167543723712124, 0.7692338620300545, 0.0026428891112654927],
        [0.08785045497599718, 0.1429156829939483, 0.7692338620300545, 0.0034278724095887763],
        [0.1429156829939483, 0.087850454975997194, 0.7692338620300545, 0.0034278724095887763],
        [0.19167543723712124, 0.039090700732824252, 0.7692338620300545, 0.0026428891112654927],
        [0.22297426326865907, 0.007791874701286422, 0.7692338620300545, 0.0012550994042305557],
        [0.0024666971526702448, 0.070587631527588721, 0.92694567131974104, 0.00024951418707877239],
        [0.012375060417440052, 0.060679268262818914, 0.92694567131974104, 0.00052540725134119577],
        [0.027811082115360607, 0.045243246564898351, 0.92694567131974104, 0.00068146219718161953],
        [0.045243246564898358, 0.027811082115360604, 0.92694567131974104, 0.00068146219718161953],
        [0.060679268262818907, 0.012375060417440055, 0.92694567131974104, 0.00052540725134119577],
        [0.070587631527588721, 0.0024666971526702414, 0.92694567131974104, 0.00024951418707877239],
        [0.032775366614459879, 0.029316427159784941, 0.9379082062257551, 0.0020647551175529532],
        [0.16442924159482744, 0.029316427159784941, 0.80625433124538759, 0.0043477981100276215],
        [0.36952992437237664, 0.029316427159784941, 0.60115364846783836, 0.0056391685600042374],
        [0.60115364846783836, 0.029316427159784941, 0.36952992437237664, 0.0056391685600042374],
        [0.80625433124538759, 0.029316427159784941, 0.16442924159482741, 0.0043477981100276215],
        [0.9379082062257551, 0.029316427159784941, 0.0327753666144599, 0.0020647551175529532],
        [0.028765333012559118, 0.1480785996684843, 0.82315606731895652, 0.0038702915889991685],
        [0.14431148695041665, 0.1480785996684843, 0.70760991338109902, 0.0081497540860192719],
        [0.32431830458877597, 0.1480785996684843, 0.52760309574273967, 0.010570370530234666],
        [0.52760309574273967, 0.1480785996684843, 0.32431830458877597, 0.010570370530234666],
        [0.70760991338109902, 0.1480785996684843, 0.14431148695041662, 0.0081497540860192719],
        [0.82315606731895652, 0.1480785996684843, 0.028765333012559124, 0.0038702915889991685],
        [0.022386872978030627, 0.3369846902811543, 0.64062843674081504, 0.0040202021347550279],
        [0.1123116817809537, 0.3369846902811543, 0.55070362793789196, 0.0084654238630158755],
        [0.25240356807651798, 0.3369846902811543, 0.41061174164232772, 0.010979799633595558],
        [0.41061174164232772, 0.3369846902811543, 0.25240356807651798, 0.010979799633595558],
        [0.55070362793789196, 0.3369846902811543, 0.11231168178095374, 0.0084654238630158755],
        [0.64062843674081504, 0.3369846902811543, 0.022386872978030659, 0.0040202021347550279],
        [0.014901563366671153, 0.55867151877155019, 0.42642691786177866, 0.0028171785989810354],
        [0.074758973462649092, 0.55867151877155019, 0.36656950776580072, 0.0059321919990087532],
        [0.16800951912119183, 0.55867151877155019, 0.27331896210725798, 0.0076941545504527415],
        [0.27331896210725798, 0.55867151877155019, 0.16800951912119183, 0.0076941545504527415],
        [0.36656950776580072, 0.55867151877155019, 0.074758973462649092, 0.0059321919990087532],
        [0.42642691786177866, 0.55867151877155019, 0.014901563366671144, 0.0028171785989810354],
        [0.007791874701286429, 0.7692338620300545, 0.22297426326865907, 0.0012550994042305557],
        [0.039090700732824245, 0.7692338620300545, 0.19167543723712124, 0.0026428891112654927],
        [0.08785045497599718, 0.7692338620300545, 0.1429156829939483, 0.0034278724095887763],
        [0.1429156829939483, 0.7692338620300545, 0.087850454975997194, 0.0034278724095887763],
        [0.19167543723712124, 0.7692338620300545, 0.039090700732824252, 0.0026428891112654927],
        [0.22297426326865907, 0.7692338620300545, 0.007791874701286422, 0.0012550994042305557],
        [0.0024666971526702448, 0.92694567131974104, 0.070587631527588721, 0.00024951418707877239],
        [0.012375060417440052, 0.92694567131974104, 0.060679268262818914, 0.00052540725134119577],
        [0.027811082115360607, 0.92694567131974104, 0.045243246564898351, 0.00068146219718161953],
        [0.045243246564898358, 0.92694567131974104, 0.027811082115360604, 0.00068146219718161953],
        [0.060679268262818907, 0.92694567131974104, 0.012375060417440055, 0.00052540725134119577],
        [0.070587631527588721, 0.92694567131974104, 0.0024666971526702414, 0.00024951418707877239],
    ]),
}

# rules with negative weights are avoided by using the next exact rule up
_DEGREE_TO_RULE = {1: 2, 2: 2, 3: 4, 4: 4, 5: 5, 6: 6, 7: 8, 8: 8, 9: 9, 10: 10}


@lru_cache(maxsize=None)
def triangle_rule(degree: int):
    """Return ``(bary, weights)`` exact for polynomials of total ``degree``."""
    try:
        table = _RULES[_DEGREE_TO_RULE[degree]]
    except KeyError:
        raise ValueError(f"no triangle rule for degree {degree}") from None
    bary = table[:, :3] / table[:, :3].sum(axis=1, keepdims=True)
    w = table[:, 3] / table[:, 3].sum()
    bary.setflags(write=False)
    w.setflags(write=False)
    return bary, w
