"""Regenerate the fixture corpora.

The 50 clean reports below are hand-written chest-X-ray-style texts, kept
deliberately jargon-dense so the offline simplifier has work to do. This
script only assembles files from them: reports.csv carries the clean corpus,
filter_corpus.csv interleaves ten planted bad records (three empty, four
under five words, three with characters outside the ingest whitelist) at
positions drawn from a fixed seed, so the filtering fixture is reproducible
byte for byte.

Run from the repository root:  python3 fixtures/make_corpus.py
"""

import csv
import random
from pathlib import Path

SEED = 20240817

CLEAN_REPORTS = [
    ("r001", "Cardiomegaly is present. The lungs are clear of consolidation."),
    ("r002", "The cardiac silhouette is enlarged. There is a small left pleural effusion with blunting of the costophrenic angle, and adjacent atelectasis is seen at the left base."),
    ("r003", "Stable cardiomegaly with pulmonary vascular congestion and mild interstitial edema. No pneumothorax or pleural effusion is identified. Degenerative changes are noted in the thoracic spine."),
    ("r004", "There is a focal opacity in the right upper lobe concerning for pneumonia, and a follow-up examination after treatment is recommended to document resolution."),
    ("r005", "The lungs are hyperinflated with flattening of both hemidiaphragms, consistent with emphysema. No focal consolidation, pleural effusion, or pneumothorax. The cardiomediastinal silhouette is within normal limits."),
    ("r006", "Bibasilar opacities are present and may reflect atelectasis or early consolidation, but infection cannot be excluded on this single view and correlation with symptoms is advised."),
    ("r007", "A calcified granuloma is noted in the left mid lung. The pulmonary vasculature is unremarkable. No acute osseous abnormality."),
    ("r008", "Heart size is at the upper limits of normal. Mild unfolding of the thoracic aorta. The lungs are clear without infiltrate, effusion, or pneumothorax."),
    ("r009", "Interval increase in the right pleural effusion with associated compressive atelectasis, and the cardiac silhouette remains enlarged with pulmonary venous congestion suggesting decompensated failure."),
    ("r010", "Low lung volumes with bronchovascular crowding. Patchy bibasilar atelectasis. No definite focal consolidation or pleural effusion. Mild thoracic spondylosis."),
    ("r011", "The previously seen right middle lobe infiltrate has resolved. Lungs are now clear bilaterally. Cardiac and mediastinal contours are stable and unremarkable."),
    ("r012", "There is a 9 mm nodule projecting over the left lower lobe, and comparison with prior imaging is necessary to establish stability or growth over time."),
    ("r013", "Diffuse interstitial prominence with septal thickening suggests pulmonary edema. Small bilateral pleural effusions. The cardiac silhouette is moderately enlarged."),
    ("r014", "No acute cardiopulmonary abnormality. The cardiomediastinal silhouette and hilar contours are normal. The lungs are well expanded and clear. Osseous structures are intact."),
    ("r015", "Apical pleural thickening is noted bilaterally with superior retraction of the hila, and volume loss in both upper lobes suggests prior granulomatous disease rather than an acute process."),
    ("r016", "Left basilar consolidation with air bronchograms is consistent with pneumonia. A trace left pleural effusion is suspected. Clinical correlation and follow-up radiographs are recommended."),
    ("r017", "Moderate cardiomegaly with cephalization of the pulmonary vasculature. Mild interstitial edema without frank consolidation. Degenerative changes of the shoulder girdles."),
    ("r018", "The right hemidiaphragm is elevated with adjacent platelike atelectasis, but the remainder of the lungs is clear and no pleural effusion is evident on this examination."),
    ("r019", "Severe thoracic scoliosis distorts the cardiomediastinal silhouette and limits evaluation, but no focal consolidation, effusion, or pneumothorax is identified within that limitation."),
    ("r020", "Postsurgical changes of the chest wall with surgical clips projected over the left hilum. Lungs are clear. No evidence of recurrent mass or adenopathy."),
    ("r021", "A small right apical pneumothorax is present following line placement, and a repeat radiograph after catheter adjustment is recommended to confirm stability of the finding."),
    ("r022", "Scattered calcified granulomas and calcified hilar lymph nodes indicate prior granulomatous infection. No active consolidation or effusion. Heart size is normal."),
    ("r023", "Increased retrocardiac opacity silhouettes the left hemidiaphragm and likely represents left lower lobe collapse, although a developing consolidation cannot be fully excluded here."),
    ("r024", "Mild pulmonary hyperinflation without focal airspace disease. The cardiac silhouette is normal in size. Atherosclerotic calcification of the aortic knob is noted."),
    ("r025", "There is confluent consolidation in the right lower lobe with an associated parapneumonic effusion, and bronchoscopic or clinical follow-up is advised after a full course of therapy."),
    ("r026", "Bilateral perihilar opacities with peribronchial cuffing suggest pulmonary edema in the proper clinical setting. The cardiac silhouette is mildly enlarged. No pneumothorax."),
    ("r027", "The endotracheal tube terminates 4 cm above the carina. Diffuse bilateral opacities persist, consistent with moderate pulmonary edema. Lines and tubes are otherwise satisfactory."),
    ("r028", "Stable 6 mm calcified nodule in the right upper lobe, unchanged over two years and consistent with a benign healed granuloma. Lungs are otherwise clear."),
    ("r029", "Blunting of both costophrenic angles suggests small bilateral pleural effusions, and mild vascular redistribution raises concern for early congestive changes in this patient."),
    ("r030", "No focal consolidation, pneumothorax, or pleural effusion. Mild degenerative changes of the acromioclavicular joints. The visualized upper abdomen is unremarkable."),
    ("r031", "Dense consolidation of the left upper lobe with slight volume loss is worrisome for pneumonia, and follow-up to complete resolution is recommended to exclude an underlying lesion."),
    ("r032", "The pulmonary vascularity is normal. There is minimal platelike atelectasis at the right base. No acute osseous findings. Stable cardiomediastinal contours."),
    ("r033", "Marked cardiomegaly with a left ventricular configuration. Pulmonary vasculature is congested with mild interstitial edema. Small left pleural effusion is suspected."),
    ("r034", "A retrocardiac hiatal hernia is incidentally noted. The lungs are grossly clear without consolidation or effusion, and the hilar and mediastinal contours are within normal limits."),
    ("r035", "Right middle lobe opacity with silhouetting of the right heart border is compatible with pneumonia, and radiographic clearance should be confirmed after antibiotic therapy concludes."),
    ("r036", "Diffuse reticular interstitial prominence with basilar predominance may reflect chronic interstitial disease. No superimposed acute consolidation. Heart size is normal."),
    ("r037", "Hyperinflation with attenuated peripheral vasculature and a small flattened diaphragm is consistent with chronic obstructive disease, but no acute superimposed abnormality is detected."),
    ("r038", "Trace right pleural effusion with adjacent basilar atelectasis. The cardiac silhouette is mildly enlarged. Mild degenerative spurring of the thoracic spine."),
    ("r039", "Patchy bilateral airspace opacities in a perihilar distribution are concerning for multifocal pneumonia or edema, and short interval follow-up imaging is suggested for clarification."),
    ("r040", "The lungs are clear. The cardiomediastinal silhouette is normal. No pleural effusion or pneumothorax. Mild levoscoliosis of the thoracic spine is again demonstrated."),
    ("r041", "Left lower lobe atelectasis persists with associated elevation of the left hemidiaphragm, and a small left effusion remains, both slightly improved from the prior examination."),
    ("r042", "There is asymmetric right apical pleural thickening; stability over time should be documented, as apical thickening can occasionally conceal a slowly growing lesion."),
    ("r043", "Cardiomegaly and bilateral pleural effusions with interstitial edema indicate congestive heart failure. Comparison shows mild worsening since the previous study."),
    ("r044", "The bones are diffusely demineralized with chronic compression deformities in the mid thoracic spine, but no acute fracture and no acute cardiopulmonary process is identified."),
    ("r045", "A vague opacity projects over the left mid lung on this view only, and a lateral radiograph or computed tomography is recommended for further characterization."),
    ("r046", "Status post sternotomy with intact wires. Stable postoperative cardiomediastinal contours. No consolidation, effusion, or pneumothorax. Mild bibasilar atelectasis."),
    ("r047", "Bilateral hilar enlargement with a nodular interstitial pattern raises the possibility of sarcoidosis, and correlation with clinical findings plus prior imaging is recommended."),
    ("r048", "Mild patchy opacity at the left base most likely reflects atelectasis rather than consolidation, and no pleural effusion or pneumothorax accompanies the finding today."),
    ("r049", "The trachea is midline. Pulmonary vascularity is within normal limits. No infiltrate, nodule, or effusion is apparent. Degenerative changes affect both shoulders."),
    ("r050", "Moderate pulmonary edema with perihilar haze and small bilateral effusions has worsened, and the enlarged cardiac silhouette suggests progressive decompensation of known heart failure."),
]

PLANTED_BAD = [
    ("bad-empty-1", ""),
    ("bad-empty-2", "   "),
    ("bad-empty-3", "\t  "),
    ("bad-short-1", "Normal chest."),
    ("bad-short-2", "No change."),
    ("bad-short-3", "Clear lungs bilaterally."),
    ("bad-short-4", "Stable exam today."),
    ("bad-chars-1", "Heart size normal * lungs grossly clear today."),
    ("bad-chars-2", "Lungs clear \x07 no effusion or consolidation seen."),
    ("bad-chars-3", "Unreadable § fragment"),
]


def write_csv(path, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "text"])
        writer.writerows(rows)


def main():
    here = Path(__file__).parent
    write_csv(here / "reports.csv", CLEAN_REPORTS)

    rng = random.Random(SEED)
    merged = list(CLEAN_REPORTS)
    for record in PLANTED_BAD:
        merged.insert(rng.randrange(len(merged) + 1), record)
    write_csv(here / "filter_corpus.csv", merged)
    print(f"wrote {len(CLEAN_REPORTS)} clean and {len(merged)} mixed records")


if __name__ == "__main__":
    main()
